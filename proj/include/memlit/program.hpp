#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memlit {

using Value = std::uint8_t;

inline constexpr std::size_t kMaxThreads = 4;
inline constexpr std::size_t kMaxInstructionsPerThread = 8;

// consume is representable so that the validator can reject it with a
// proper diagnostic instead of the parser silently dropping it.
enum class MemoryOrder : std::uint8_t { relaxed, consume, acquire, release, acq_rel, seq_cst };

enum class OpKind : std::uint8_t {
  load,
  store,
  cas_strong,
  cas_weak,
  exchange,
  fetch_add,
  fetch_sub,
  fetch_and,
  fetch_or,
  fetch_xor,
  fence,
  na_load,
  na_store,
};

std::string_view to_string(MemoryOrder order);
std::string_view to_string(OpKind kind);
std::optional<MemoryOrder> parse_memory_order(std::string_view word);
std::optional<OpKind> parse_op_kind(std::string_view word);

bool is_cas(OpKind kind);
/// exchange, fetch_* and CAS.
bool is_rmw(OpKind kind);
/// Instructions that read a location (loads and every RMW).
bool reads_memory(OpKind kind);
/// Instructions that may write a location. A CAS only writes on success.
bool may_write_memory(OpKind kind);
bool is_atomic(OpKind kind);
/// Kinds that put the value they read into a destination register.
bool has_destination(OpKind kind);
/// Kinds carrying a value operand (store, exchange, fetch_*).
bool has_operand(OpKind kind);

/// Value written by a non-CAS RMW given the old value and the operand,
/// wrapping modulo 256.
Value apply_rmw(OpKind kind, Value old_value, Value operand);

/// Failure order used by the single-order CAS overloads.
MemoryOrder derive_failure_order(MemoryOrder success);

struct Operand {
  bool is_register = false;
  Value literal = 0;
  int reg = -1;

  static Operand constant(Value v) { return Operand{false, v, -1}; }
  static Operand from_register(int r) { return Operand{true, 0, r}; }

  bool operator==(const Operand&) const = default;
};

struct Instruction {
  OpKind kind = OpKind::fence;
  int location = -1;  // index into Program::locations, -1 for fences
  int dest = -1;      // index into Thread::registers
  Operand operand;
  Value expected = 0;  // CAS only
  Value desired = 0;   // CAS only
  MemoryOrder order = MemoryOrder::seq_cst;
  MemoryOrder failure_order = MemoryOrder::seq_cst;  // CAS only

  bool operator==(const Instruction&) const = default;
};

struct Thread {
  std::string name;
  std::vector<std::string> registers;
  std::vector<Instruction> code;

  int register_index(std::string_view reg) const;

  bool operator==(const Thread&) const = default;
};

/// Boolean formula over final-state atoms.
struct Formula {
  enum class Kind : std::uint8_t { register_equals, location_equals, conjunction, disjunction, negation };

  Kind kind = Kind::conjunction;
  std::string thread;  // register_equals only
  std::string name;    // register or location name
  Value value = 0;
  std::vector<Formula> operands;

  static Formula reg_eq(std::string thread, std::string reg, Value v);
  static Formula loc_eq(std::string loc, Value v);
  static Formula all_of(std::vector<Formula> parts);
  static Formula any_of(std::vector<Formula> parts);
  static Formula negate(Formula f);

  bool operator==(const Formula&) const = default;
};

enum class Quantifier : std::uint8_t { exists, forall };

struct Assertion {
  Quantifier quantifier = Quantifier::exists;
  Formula formula;

  bool operator==(const Assertion&) const = default;
};

struct Program {
  std::string name;
  std::vector<std::string> locations;
  std::vector<Value> initial;  // parallel to locations
  std::vector<Thread> threads;
  Assertion assertion;

  int location_index(std::string_view loc) const;
  int thread_index(std::string_view thread) const;
  std::size_t instruction_count() const;

  bool operator==(const Program&) const = default;
};

struct Diagnostic {
  int thread = -1;       // -1: program-level
  int instruction = -1;  // -1: thread-level
  std::string rule;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::vector<Diagnostic> validate(const Program& program);
std::string format_diagnostic(const Program& program, const Diagnostic& d);

/// Copy of `program` with every atomic order raised to seq_cst and every
/// non-atomic access turned into an atomic one.
Program strengthen_to_seq_cst(Program program);

struct Outcome {
  std::vector<std::vector<Value>> registers;  // [thread][register]
  std::vector<Value> memory;                  // [location]

  auto operator<=>(const Outcome&) const = default;
};

struct OutcomeSet {
  std::set<Outcome> outcomes;
  bool racy = false;

  bool operator==(const OutcomeSet&) const = default;
};

/// "P0:r1=0 P1:r2=1 x=1 y=1"
std::string format_outcome(const Program& program, const Outcome& outcome);

bool satisfies(const Program& program, const Formula& formula, const Outcome& outcome);

enum class Verdict : std::uint8_t { allowed, forbidden, holds, violated };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view word);

struct AssertionResult {
  Verdict verdict = Verdict::forbidden;
  // exists: outcomes satisfying the formula; forall: outcomes violating it.
  std::vector<Outcome> witnesses;
};

AssertionResult eval_assertion(const Program& program, const OutcomeSet& outcomes);

/// Thrown by the backends when an exploration limit is hit.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(std::string limit, std::size_t value);

  const std::string& limit() const { return limit_; }
  std::size_t value() const { return value_; }

 private:
  std::string limit_;
  std::size_t value_;
};

}  // namespace memlit
