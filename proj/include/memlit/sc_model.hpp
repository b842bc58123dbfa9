#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "memlit/program.hpp"

namespace memlit {

struct ScState {
  std::vector<Value> memory;
  std::vector<std::size_t> next;  // per-thread next instruction
  std::vector<std::vector<Value>> registers;

  bool finished(const Program& program) const;
  std::string key() const;

  bool operator==(const ScState&) const = default;
};

struct ScOptions {
  bool weak_spurious = true;  // cas_weak may fail even when the values match
  bool memoize = true;
  std::size_t max_states = 1'000'000;
};

struct ScResult {
  OutcomeSet outcomes;
  std::size_t states = 0;          // distinct states visited (memoized) or nodes expanded
  std::size_t complete_paths = 0;  // finished executions reached; counts interleavings when not memoized
};

ScState sc_initial(const Program& program);

/// Runs the next instruction of `thread`. Returns one successor, or two for
/// a cas_weak whose values match (the second one fails spuriously).
/// Throws std::logic_error when the thread has no instruction left.
std::vector<ScState> sc_step(const Program& program, const ScState& state, std::size_t thread,
                             bool weak_spurious = true);

ScResult enumerate_sc(const Program& program, const ScOptions& options = {});

}  // namespace memlit
