#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "memlit/program.hpp"

namespace memlit::testing {

// Brute-force SC: run every schedule (a multiset permutation of thread ids)
// with a direct interpreter. No memoization, no spurious CAS failures.
inline std::set<Outcome> sc_by_schedules(const Program& p) {
  std::vector<int> schedule;
  for (std::size_t t = 0; t < p.threads.size(); ++t) {
    schedule.insert(schedule.end(), p.threads[t].code.size(), static_cast<int>(t));
  }
  std::set<Outcome> out;
  do {
    std::vector<Value> mem = p.initial;
    std::vector<std::vector<Value>> regs;
    for (const auto& t : p.threads) regs.emplace_back(t.registers.size(), 0);
    std::vector<std::size_t> pc(p.threads.size(), 0);
    for (int t : schedule) {
      const Instruction& i = p.threads[t].code[pc[t]++];
      auto& r = regs[t];
      const Value v = i.operand.is_register ? r[i.operand.reg] : i.operand.literal;
      switch (i.kind) {
        case OpKind::fence:
          break;
        case OpKind::load:
        case OpKind::na_load:
          r[i.dest] = mem[i.location];
          break;
        case OpKind::store:
        case OpKind::na_store:
          mem[i.location] = v;
          break;
        case OpKind::cas_strong:
        case OpKind::cas_weak: {
          const Value old = mem[i.location];
          if (old == i.expected) mem[i.location] = i.desired;
          r[i.dest] = old;
          break;
        }
        default: {
          const Value old = mem[i.location];
          Value nv = v;
          if (i.kind == OpKind::fetch_add) nv = static_cast<Value>(old + v);
          if (i.kind == OpKind::fetch_sub) nv = static_cast<Value>(old - v);
          if (i.kind == OpKind::fetch_and) nv = old & v;
          if (i.kind == OpKind::fetch_or) nv = old | v;
          if (i.kind == OpKind::fetch_xor) nv = old ^ v;
          mem[i.location] = nv;
          r[i.dest] = old;
        }
      }
    }
    out.insert(Outcome{regs, mem});
  } while (std::next_permutation(schedule.begin(), schedule.end()));
  return out;
}

}  // namespace memlit::testing
