#include "memlit/sc_model.hpp"

#include <stdexcept>
#include <unordered_set>

namespace memlit {

bool ScState::finished(const Program& program) const {
  for (std::size_t t = 0; t < program.threads.size(); ++t) {
    if (next[t] < program.threads[t].code.size()) return false;
  }
  return true;
}

std::string ScState::key() const {
  std::string k(memory.begin(), memory.end());
  for (auto pc : next) k.push_back(static_cast<char>(pc));
  for (const auto& regs : registers) k.append(regs.begin(), regs.end());
  return k;
}

ScState sc_initial(const Program& program) {
  ScState s;
  s.memory = program.initial;
  s.next.assign(program.threads.size(), 0);
  for (const auto& t : program.threads) s.registers.emplace_back(t.registers.size(), 0);
  return s;
}

std::vector<ScState> sc_step(const Program& program, const ScState& state, std::size_t thread,
                             bool weak_spurious) {
  if (thread >= program.threads.size() || state.next[thread] >= program.threads[thread].code.size()) {
    throw std::logic_error("sc_step: thread has no next instruction");
  }
  const Instruction& ins = program.threads[thread].code[state.next[thread]];
  ScState s = state;
  ++s.next[thread];
  auto& regs = s.registers[thread];
  const Value operand = ins.operand.is_register ? regs.at(ins.operand.reg) : ins.operand.literal;

  switch (ins.kind) {
    case OpKind::fence:
      break;
    case OpKind::load:
    case OpKind::na_load:
      regs.at(ins.dest) = s.memory.at(ins.location);
      break;
    case OpKind::store:
    case OpKind::na_store:
      s.memory.at(ins.location) = operand;
      break;
    case OpKind::cas_strong:
    case OpKind::cas_weak: {
      const Value old = s.memory.at(ins.location);
      regs.at(ins.dest) = old;
      if (old != ins.expected) return {s};
      ScState failed = s;
      s.memory[ins.location] = ins.desired;
      if (ins.kind == OpKind::cas_weak && weak_spurious) return {s, failed};
      return {s};
    }
    default: {
      const Value old = s.memory.at(ins.location);
      regs.at(ins.dest) = old;
      s.memory[ins.location] = apply_rmw(ins.kind, old, operand);
    }
  }
  return {s};
}

namespace {

class ScExplorer {
 public:
  ScExplorer(const Program& program, const ScOptions& options)
      : program_(program), options_(options) {}

  ScResult run() {
    visit(sc_initial(program_));
    return std::move(result_);
  }

 private:
  void visit(const ScState& s) {
    if (options_.memoize && !seen_.insert(s.key()).second) return;
    if (++result_.states > options_.max_states) {
      throw ResourceLimitError("max-states", options_.max_states);
    }
    if (s.finished(program_)) {
      ++result_.complete_paths;
      result_.outcomes.outcomes.insert(Outcome{s.registers, s.memory});
      return;
    }
    for (std::size_t t = 0; t < program_.threads.size(); ++t) {
      if (s.next[t] >= program_.threads[t].code.size()) continue;
      for (const auto& succ : sc_step(program_, s, t, options_.weak_spurious)) visit(succ);
    }
  }

  const Program& program_;
  const ScOptions& options_;
  std::unordered_set<std::string> seen_;
  ScResult result_;
};

}  // namespace

ScResult enumerate_sc(const Program& program, const ScOptions& options) {
  return ScExplorer(program, options).run();
}

}  // namespace memlit
