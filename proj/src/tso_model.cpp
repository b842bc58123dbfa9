#include "memlit/tso_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace memlit {

namespace {

bool is_mfence(const Instruction& ins) {
  return ins.kind == OpKind::fence && ins.order == MemoryOrder::seq_cst;
}

void drain(TsoState& s, std::size_t t) {
  for (const auto& w : s.buffers[t]) s.memory[w.location] = w.value;
  s.buffers[t].clear();
}

}  // namespace

bool TsoState::finished(const Program& program) const {
  for (std::size_t t = 0; t < program.threads.size(); ++t) {
    if (next[t] < program.threads[t].code.size() || !buffers[t].empty()) return false;
  }
  return true;
}

std::string TsoState::key() const {
  std::string k(memory.begin(), memory.end());
  for (std::size_t t = 0; t < next.size(); ++t) {
    k.push_back(static_cast<char>(next[t]));
    k.append(registers[t].begin(), registers[t].end());
    k.push_back(static_cast<char>(buffers[t].size()));
    for (const auto& w : buffers[t]) {
      k.push_back(static_cast<char>(w.location));
      k.push_back(static_cast<char>(w.value));
    }
  }
  k.push_back(static_cast<char>(lock_owner));
  return k;
}

TsoState tso_initial(const Program& program) {
  TsoState s;
  s.memory = program.initial;
  s.buffers.resize(program.threads.size());
  s.next.assign(program.threads.size(), 0);
  for (const auto& t : program.threads) s.registers.emplace_back(t.registers.size(), 0);
  return s;
}

std::vector<TsoTransition> tso_enabled(const Program& program, const TsoState& state) {
  std::vector<TsoTransition> out;
  const int n = static_cast<int>(program.threads.size());
  for (int t = 0; t < n; ++t) {
    const auto& code = program.threads[t].code;
    if (state.next[t] >= code.size()) continue;
    // While one thread holds the lock no other thread executes (in
    // particular none can read).
    if (state.lock_owner != -1 && state.lock_owner != t) continue;
    if (is_mfence(code[state.next[t]]) && !state.buffers[t].empty()) continue;
    out.push_back(TsoTransition::exec(t));
  }
  for (int t = 0; t < n; ++t) {
    if (state.buffers[t].empty()) continue;
    if (state.lock_owner != -1 && state.lock_owner != t) continue;
    out.push_back(TsoTransition::dequeue(t));
  }
  return out;
}

std::vector<TsoState> tso_apply(const Program& program, const TsoState& state,
                                const TsoTransition& tr, bool weak_spurious) {
  const auto enabled = tso_enabled(program, state);
  if (std::find(enabled.begin(), enabled.end(), tr) == enabled.end()) {
    throw std::logic_error("tso_apply: transition not enabled");
  }
  const auto t = static_cast<std::size_t>(tr.thread);
  TsoState s = state;

  if (tr.kind == TsoTransition::Kind::dequeue) {
    const BufferedWrite w = s.buffers[t].front();
    s.buffers[t].erase(s.buffers[t].begin());
    s.memory[w.location] = w.value;
    return {s};
  }

  const Instruction& ins = program.threads[t].code[s.next[t]];
  ++s.next[t];
  auto& regs = s.registers[t];
  const Value operand = ins.operand.is_register ? regs.at(ins.operand.reg) : ins.operand.literal;

  switch (ins.kind) {
    case OpKind::fence:
      // mfence is only enabled with an empty buffer; weaker fences emit no
      // instruction on x86.
      return {s};
    case OpKind::load:
    case OpKind::na_load: {
      const auto& buf = s.buffers[t];
      auto hit = std::find_if(buf.rbegin(), buf.rend(),
                              [&](const BufferedWrite& w) { return w.location == ins.location; });
      regs.at(ins.dest) = hit != buf.rend() ? hit->value : s.memory.at(ins.location);
      return {s};
    }
    case OpKind::store:
    case OpKind::na_store:
      s.buffers[t].push_back(BufferedWrite{ins.location, operand});
      return {s};
    default:
      break;
  }

  // Locked instruction: take the lock, flush, update memory directly, flush,
  // release. Other threads cannot observe the intermediate states.
  s.lock_owner = tr.thread;
  drain(s, t);
  const Value old = s.memory.at(ins.location);
  regs.at(ins.dest) = old;
  std::vector<TsoState> out;
  if (is_cas(ins.kind)) {
    if (old == ins.expected) {
      TsoState failed = s;
      s.memory[ins.location] = ins.desired;
      out.push_back(s);
      if (ins.kind == OpKind::cas_weak && weak_spurious) out.push_back(failed);
    } else {
      out.push_back(s);
    }
  } else {
    s.memory[ins.location] = apply_rmw(ins.kind, old, operand);
    out.push_back(s);
  }
  for (auto& st : out) {
    drain(st, t);
    st.lock_owner = -1;
  }
  return out;
}

namespace {

class TsoExplorer {
 public:
  TsoExplorer(const Program& program, const TsoOptions& options)
      : program_(program), options_(options) {}

  TsoResult run() {
    TsoState init = tso_initial(program_);
    std::string key = init.key();
    seen_.emplace(key, Parent{});
    visit(init, key);
    return std::move(result_);
  }

 private:
  struct Parent {
    std::string key;  // empty for the root
    TsoStep step;
  };

  void visit(const TsoState& s, const std::string& key) {
    if (++result_.states > options_.max_states) {
      throw ResourceLimitError("max-states", options_.max_states);
    }
    if (s.finished(program_)) {
      Outcome o{s.registers, s.memory};
      if (result_.outcomes.outcomes.insert(o).second && options_.record_traces) {
        result_.traces.emplace(std::move(o), trace_to(key));
      }
      return;
    }
    for (const auto& tr : tso_enabled(program_, s)) {
      const auto succs = tso_apply(program_, s, tr, options_.weak_spurious);
      for (std::size_t b = 0; b < succs.size(); ++b) {
        std::string k = succs[b].key();
        if (seen_.count(k)) continue;
        Parent parent;
        if (options_.record_traces) parent = Parent{key, TsoStep{tr, static_cast<int>(b)}};
        seen_.emplace(k, std::move(parent));
        visit(succs[b], k);
      }
    }
  }

  TsoTrace trace_to(const std::string& key) const {
    TsoTrace trace;
    const std::string* k = &key;
    while (true) {
      const Parent& p = seen_.at(*k);
      if (p.key.empty()) break;
      trace.push_back(p.step);
      k = &p.key;
    }
    std::reverse(trace.begin(), trace.end());
    return trace;
  }

  const Program& program_;
  const TsoOptions& options_;
  std::unordered_map<std::string, Parent> seen_;
  TsoResult result_;
};

}  // namespace

TsoResult enumerate_tso(const Program& program, const TsoOptions& options) {
  return TsoExplorer(program, options).run();
}

}  // namespace memlit
