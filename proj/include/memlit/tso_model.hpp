#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "memlit/program.hpp"

namespace memlit {

struct BufferedWrite {
  int location = -1;
  Value value = 0;

  bool operator==(const BufferedWrite&) const = default;
};

/// Machine state of the x86-TSO abstract machine: shared memory, one FIFO
/// store buffer per thread and a global lock used by locked instructions.
struct TsoState {
  std::vector<Value> memory;
  std::vector<std::vector<BufferedWrite>> buffers;  // front = oldest
  std::vector<std::size_t> next;
  std::vector<std::vector<Value>> registers;
  int lock_owner = -1;

  bool finished(const Program& program) const;
  std::string key() const;

  bool operator==(const TsoState&) const = default;
};

struct TsoTransition {
  enum class Kind : std::uint8_t { exec, dequeue };

  Kind kind = Kind::exec;
  int thread = 0;

  static TsoTransition exec(int t) { return {Kind::exec, t}; }
  static TsoTransition dequeue(int t) { return {Kind::dequeue, t}; }

  bool operator==(const TsoTransition&) const = default;
};

/// One step of a recorded trace. `branch` selects among the successors
/// returned by tso_apply (only a cas_weak exec has more than one).
struct TsoStep {
  TsoTransition transition;
  int branch = 0;

  bool operator==(const TsoStep&) const = default;
};

using TsoTrace = std::vector<TsoStep>;

struct TsoOptions {
  bool weak_spurious = true;
  std::size_t max_states = 1'000'000;
  bool record_traces = false;
};

struct TsoResult {
  OutcomeSet outcomes;
  std::size_t states = 0;
  std::map<Outcome, TsoTrace> traces;  // filled when TsoOptions::record_traces
};

TsoState tso_initial(const Program& program);

std::vector<TsoTransition> tso_enabled(const Program& program, const TsoState& state);

/// Throws std::logic_error if `t` is not enabled in `state`.
std::vector<TsoState> tso_apply(const Program& program, const TsoState& state,
                                const TsoTransition& t, bool weak_spurious = true);

TsoResult enumerate_tso(const Program& program, const TsoOptions& options = {});

}  // namespace memlit
