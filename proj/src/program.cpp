#include "memlit/program.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace memlit {

namespace {

constexpr std::array<std::string_view, 6> kOrderNames = {
    "relaxed", "consume", "acquire", "release", "acq_rel", "seq_cst"};

constexpr std::array<std::string_view, 13> kOpNames = {
    "load",      "store",    "cas_strong", "cas_weak", "exchange", "fetch_add", "fetch_sub",
    "fetch_and", "fetch_or", "fetch_xor",  "fence",    "na_load",  "na_store"};

constexpr std::array<std::string_view, 4> kVerdictNames = {"allowed", "forbidden", "holds",
                                                           "violated"};

}  // namespace

std::string_view to_string(MemoryOrder order) { return kOrderNames[static_cast<int>(order)]; }

std::string_view to_string(OpKind kind) { return kOpNames[static_cast<int>(kind)]; }

std::optional<MemoryOrder> parse_memory_order(std::string_view word) {
  for (std::size_t i = 0; i < kOrderNames.size(); ++i) {
    if (kOrderNames[i] == word) return static_cast<MemoryOrder>(i);
  }
  return std::nullopt;
}

std::optional<OpKind> parse_op_kind(std::string_view word) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == word) return static_cast<OpKind>(i);
  }
  return std::nullopt;
}

bool is_cas(OpKind kind) { return kind == OpKind::cas_strong || kind == OpKind::cas_weak; }

bool is_rmw(OpKind kind) {
  switch (kind) {
    case OpKind::cas_strong:
    case OpKind::cas_weak:
    case OpKind::exchange:
    case OpKind::fetch_add:
    case OpKind::fetch_sub:
    case OpKind::fetch_and:
    case OpKind::fetch_or:
    case OpKind::fetch_xor:
      return true;
    default:
      return false;
  }
}

bool reads_memory(OpKind kind) {
  return kind == OpKind::load || kind == OpKind::na_load || is_rmw(kind);
}

bool may_write_memory(OpKind kind) {
  return kind == OpKind::store || kind == OpKind::na_store || is_rmw(kind);
}

bool is_atomic(OpKind kind) { return kind != OpKind::na_load && kind != OpKind::na_store; }

bool has_destination(OpKind kind) { return reads_memory(kind); }

bool has_operand(OpKind kind) {
  return kind == OpKind::store || kind == OpKind::na_store || (is_rmw(kind) && !is_cas(kind));
}

Value apply_rmw(OpKind kind, Value old_value, Value operand) {
  switch (kind) {
    case OpKind::exchange:
      return operand;
    case OpKind::fetch_add:
      return static_cast<Value>(old_value + operand);
    case OpKind::fetch_sub:
      return static_cast<Value>(old_value - operand);
    case OpKind::fetch_and:
      return static_cast<Value>(old_value & operand);
    case OpKind::fetch_or:
      return static_cast<Value>(old_value | operand);
    case OpKind::fetch_xor:
      return static_cast<Value>(old_value ^ operand);
    default:
      throw std::invalid_argument("apply_rmw: not a fetch/exchange operation");
  }
}

MemoryOrder derive_failure_order(MemoryOrder success) {
  switch (success) {
    case MemoryOrder::release:
      return MemoryOrder::relaxed;
    case MemoryOrder::acq_rel:
      return MemoryOrder::acquire;
    default:
      return success;
  }
}

int Thread::register_index(std::string_view reg) const {
  auto it = std::find(registers.begin(), registers.end(), reg);
  return it == registers.end() ? -1 : static_cast<int>(it - registers.begin());
}

Formula Formula::reg_eq(std::string thread, std::string reg, Value v) {
  Formula f;
  f.kind = Kind::register_equals;
  f.thread = std::move(thread);
  f.name = std::move(reg);
  f.value = v;
  return f;
}

Formula Formula::loc_eq(std::string loc, Value v) {
  Formula f;
  f.kind = Kind::location_equals;
  f.name = std::move(loc);
  f.value = v;
  return f;
}

Formula Formula::all_of(std::vector<Formula> parts) {
  Formula f;
  f.kind = Kind::conjunction;
  f.operands = std::move(parts);
  return f;
}

Formula Formula::any_of(std::vector<Formula> parts) {
  Formula f;
  f.kind = Kind::disjunction;
  f.operands = std::move(parts);
  return f;
}

Formula Formula::negate(Formula inner) {
  Formula f;
  f.kind = Kind::negation;
  f.operands.push_back(std::move(inner));
  return f;
}

int Program::location_index(std::string_view loc) const {
  auto it = std::find(locations.begin(), locations.end(), loc);
  return it == locations.end() ? -1 : static_cast<int>(it - locations.begin());
}

int Program::thread_index(std::string_view thread) const {
  for (std::size_t i = 0; i < threads.size(); ++i) {
    if (threads[i].name == thread) return static_cast<int>(i);
  }
  return -1;
}

std::size_t Program::instruction_count() const {
  std::size_t n = 0;
  for (const auto& t : threads) n += t.code.size();
  return n;
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& p) : program_(p) {}

  std::vector<Diagnostic> run() {
    if (program_.threads.size() > kMaxThreads) {
      add(-1, -1, "thread limit exceeded",
          "program has " + std::to_string(program_.threads.size()) + " threads, limit is " +
              std::to_string(kMaxThreads));
    }
    if (program_.initial.size() != program_.locations.size()) {
      add(-1, -1, "malformed init", "initial value table does not match the location table");
    }
    if (program_.locations.size() + program_.instruction_count() > 64) {
      add(-1, -1, "event limit exceeded", "locations plus instructions must not exceed 64");
    }
    for (std::size_t t = 0; t < program_.threads.size(); ++t) {
      for (std::size_t u = 0; u < t; ++u) {
        if (program_.threads[u].name == program_.threads[t].name) {
          add(static_cast<int>(t), -1, "duplicate thread name",
              "thread name '" + program_.threads[t].name + "' is used twice");
        }
      }
      check_thread(static_cast<int>(t));
    }
    check_formula(program_.assertion.formula);
    return std::move(out_);
  }

 private:
  void add(int thread, int index, std::string rule, std::string message) {
    out_.push_back(Diagnostic{thread, index, std::move(rule), std::move(message)});
  }

  void check_thread(int t) {
    const Thread& thread = program_.threads[t];
    if (thread.code.size() > kMaxInstructionsPerThread) {
      add(t, -1, "instruction limit exceeded",
          "thread has " + std::to_string(thread.code.size()) + " instructions, limit is " +
              std::to_string(kMaxInstructionsPerThread));
    }
    std::vector<bool> written(thread.registers.size(), false);
    for (std::size_t i = 0; i < thread.code.size(); ++i) {
      const Instruction& ins = thread.code[i];
      const int idx = static_cast<int>(i);
      check_orders(t, idx, ins);

      if (ins.kind == OpKind::fence) {
        if (ins.location != -1) add(t, idx, "fence with location", "fences take no location");
      } else if (ins.location < 0 ||
                 static_cast<std::size_t>(ins.location) >= program_.locations.size()) {
        add(t, idx, "unknown location", "instruction refers to an undeclared location");
      }

      if (has_operand(ins.kind) && ins.operand.is_register) {
        const int r = ins.operand.reg;
        if (r < 0 || static_cast<std::size_t>(r) >= written.size() || !written[r]) {
          add(t, idx, "register read before written",
              "operand register must be written earlier in the same thread");
        }
      }
      if (has_destination(ins.kind)) {
        if (ins.dest < 0 || static_cast<std::size_t>(ins.dest) >= written.size()) {
          add(t, idx, "missing destination register", "instruction needs a destination register");
        } else {
          written[ins.dest] = true;
        }
      }
    }
  }

  void check_orders(int t, int idx, const Instruction& ins) {
    const OpKind k = ins.kind;
    if (!is_atomic(k)) return;
    const MemoryOrder o = ins.order;
    if (o == MemoryOrder::consume || (is_cas(k) && ins.failure_order == MemoryOrder::consume)) {
      add(t, idx, "consume rejected", "memory_order_consume is not supported");
    }
    if (k == OpKind::load) {
      if (o == MemoryOrder::release)
        add(t, idx, "release on read operation", "release applies to writes only");
      if (o == MemoryOrder::acq_rel)
        add(t, idx, "acq_rel on non-RMW", "acq_rel applies to read-modify-write operations only");
    } else if (k == OpKind::store) {
      if (o == MemoryOrder::acquire)
        add(t, idx, "acquire on write operation", "acquire applies to reads only");
      if (o == MemoryOrder::acq_rel)
        add(t, idx, "acq_rel on non-RMW", "acq_rel applies to read-modify-write operations only");
    }
    if (is_cas(k)) {
      // The failure path is a plain load.
      if (ins.failure_order == MemoryOrder::release)
        add(t, idx, "release on read operation", "CAS failure order must be a read order");
      if (ins.failure_order == MemoryOrder::acq_rel)
        add(t, idx, "acq_rel on non-RMW", "CAS failure order must be a read order");
    }
  }

  void check_formula(const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::register_equals: {
        const int t = program_.thread_index(f.thread);
        if (t < 0) {
          add(-1, -1, "unknown thread in assertion", "no thread named '" + f.thread + "'");
          return;
        }
        const Thread& thread = program_.threads[t];
        const int r = thread.register_index(f.name);
        const bool written =
            r >= 0 && std::any_of(thread.code.begin(), thread.code.end(), [&](const auto& ins) {
              return has_destination(ins.kind) && ins.dest == r;
            });
        if (!written) {
          add(t, -1, "unknown register in assertion",
              "register '" + f.name + "' is never written by thread '" + f.thread + "'");
        }
        return;
      }
      case Formula::Kind::location_equals:
        if (program_.location_index(f.name) < 0) {
          add(-1, -1, "unknown location in assertion", "no location named '" + f.name + "'");
        }
        return;
      default:
        for (const auto& sub : f.operands) check_formula(sub);
    }
  }

  const Program& program_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& program) { return Validator(program).run(); }

std::string format_diagnostic(const Program& program, const Diagnostic& d) {
  std::ostringstream os;
  if (d.thread >= 0) {
    const auto& name = static_cast<std::size_t>(d.thread) < program.threads.size()
                           ? program.threads[d.thread].name
                           : std::to_string(d.thread);
    os << "thread " << name;
    if (d.instruction >= 0) os << ", instruction " << d.instruction;
    os << ": ";
  }
  os << d.rule << " (" << d.message << ")";
  return os.str();
}

Program strengthen_to_seq_cst(Program program) {
  for (auto& thread : program.threads) {
    for (auto& ins : thread.code) {
      if (ins.kind == OpKind::na_load) ins.kind = OpKind::load;
      if (ins.kind == OpKind::na_store) ins.kind = OpKind::store;
      ins.order = MemoryOrder::seq_cst;
      ins.failure_order = MemoryOrder::seq_cst;
    }
  }
  return program;
}

std::string format_outcome(const Program& program, const Outcome& outcome) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << ' ';
    first = false;
  };
  for (std::size_t t = 0; t < program.threads.size() && t < outcome.registers.size(); ++t) {
    const auto& regs = program.threads[t].registers;
    for (std::size_t r = 0; r < regs.size() && r < outcome.registers[t].size(); ++r) {
      sep();
      os << program.threads[t].name << ':' << regs[r] << '=' << int(outcome.registers[t][r]);
    }
  }
  for (std::size_t l = 0; l < program.locations.size() && l < outcome.memory.size(); ++l) {
    sep();
    os << program.locations[l] << '=' << int(outcome.memory[l]);
  }
  return os.str();
}

bool satisfies(const Program& program, const Formula& formula, const Outcome& outcome) {
  switch (formula.kind) {
    case Formula::Kind::register_equals: {
      const int t = program.thread_index(formula.thread);
      const int r = t < 0 ? -1 : program.threads[t].register_index(formula.name);
      if (r < 0) throw std::invalid_argument("assertion refers to unknown register " + formula.name);
      return outcome.registers.at(t).at(r) == formula.value;
    }
    case Formula::Kind::location_equals: {
      const int l = program.location_index(formula.name);
      if (l < 0) throw std::invalid_argument("assertion refers to unknown location " + formula.name);
      return outcome.memory.at(l) == formula.value;
    }
    case Formula::Kind::conjunction:
      return std::all_of(formula.operands.begin(), formula.operands.end(),
                         [&](const Formula& f) { return satisfies(program, f, outcome); });
    case Formula::Kind::disjunction:
      return std::any_of(formula.operands.begin(), formula.operands.end(),
                         [&](const Formula& f) { return satisfies(program, f, outcome); });
    case Formula::Kind::negation:
      return !satisfies(program, formula.operands.at(0), outcome);
  }
  return false;
}

std::string_view to_string(Verdict v) { return kVerdictNames[static_cast<int>(v)]; }

std::optional<Verdict> parse_verdict(std::string_view word) {
  for (std::size_t i = 0; i < kVerdictNames.size(); ++i) {
    if (kVerdictNames[i] == word) return static_cast<Verdict>(i);
  }
  return std::nullopt;
}

AssertionResult eval_assertion(const Program& program, const OutcomeSet& outcomes) {
  AssertionResult result;
  const Formula& f = program.assertion.formula;
  if (program.assertion.quantifier == Quantifier::exists) {
    for (const auto& o : outcomes.outcomes) {
      if (satisfies(program, f, o)) result.witnesses.push_back(o);
    }
    result.verdict = result.witnesses.empty() ? Verdict::forbidden : Verdict::allowed;
  } else {
    for (const auto& o : outcomes.outcomes) {
      if (!satisfies(program, f, o)) result.witnesses.push_back(o);
    }
    result.verdict = result.witnesses.empty() ? Verdict::holds : Verdict::violated;
  }
  return result;
}

ResourceLimitError::ResourceLimitError(std::string limit, std::size_t value)
    : std::runtime_error("resource limit exceeded: " + limit + " > " + std::to_string(value)),
      limit_(std::move(limit)),
      value_(value) {}

}  // namespace memlit
