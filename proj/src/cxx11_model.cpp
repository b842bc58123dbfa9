#include "memlit/cxx11_model.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace memlit {

namespace {

std::uint64_t bit(EventId e) { return std::uint64_t{1} << e; }

bool order_releases(MemoryOrder o) {
  return o == MemoryOrder::release || o == MemoryOrder::acq_rel || o == MemoryOrder::seq_cst;
}

bool order_acquires(MemoryOrder o) {
  return o == MemoryOrder::acquire || o == MemoryOrder::acq_rel || o == MemoryOrder::seq_cst;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::read:
      return "R";
    case EventKind::write:
      return "W";
    case EventKind::rmw:
      return "RMW";
    case EventKind::fence:
      return "F";
  }
  return "?";
}

bool Event::is_release_write() const {
  return atomic && !is_init() && writes() && order_releases(order);
}

bool Event::is_acquire_read() const {
  return atomic && !is_init() && reads() && order_acquires(order);
}

bool Event::is_release_fence() const { return kind == EventKind::fence && order_releases(order); }

bool Event::is_acquire_fence() const { return kind == EventKind::fence && order_acquires(order); }

EventId event_id(const Program& program, std::size_t thread, std::size_t index) {
  std::size_t id = program.locations.size();
  for (std::size_t t = 0; t < thread; ++t) id += program.threads.at(t).code.size();
  if (index >= program.threads.at(thread).code.size()) {
    throw std::out_of_range("event_id: instruction index out of range");
  }
  return static_cast<EventId>(id + index);
}

// ---------------------------------------------------------------------------
// Instantiation: from a reads-from choice to concrete events.

namespace {

struct StaticSlot {
  int thread;
  int index;
  const Instruction* ins;
};

std::vector<StaticSlot> slots_of(const Program& program) {
  std::vector<StaticSlot> slots;
  for (std::size_t t = 0; t < program.threads.size(); ++t) {
    const auto& code = program.threads[t].code;
    for (std::size_t i = 0; i < code.size(); ++i) {
      slots.push_back(StaticSlot{static_cast<int>(t), static_cast<int>(i), &code[i]});
    }
  }
  return slots;
}

class ValueSolver {
 public:
  ValueSolver(const Program& program, const std::vector<EventId>& rf,
              const std::vector<bool>& spurious)
      : program_(program),
        rf_(rf),
        spurious_(spurious),
        slots_(slots_of(program)),
        base_(static_cast<EventId>(program.locations.size())) {
    const std::size_t n = base_ + slots_.size();
    read_state_.assign(n, State::unknown);
    write_state_.assign(n, State::unknown);
    read_value_.assign(n, 0);
    write_value_.assign(n, 0);
  }

  std::optional<CandidateExecution> solve() {
    const std::size_t n = base_ + slots_.size();
    if (rf_.size() != n) throw std::invalid_argument("instantiate: rf vector has the wrong size");
    if (n > Relation::kMaxUniverse) throw ResourceLimitError("events", Relation::kMaxUniverse);

    CandidateExecution c;
    c.location_count = program_.locations.size();
    c.rf.assign(n, -1);
    for (EventId l = 0; l < base_; ++l) {
      Event e;
      e.id = l;
      e.kind = EventKind::write;
      e.atomic = false;
      e.order = MemoryOrder::relaxed;
      e.location = l;
      e.written_value = program_.initial.at(l);
      c.events.push_back(e);
    }
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& slot = slots_[s];
      const Instruction& ins = *slot.ins;
      const EventId id = base_ + static_cast<EventId>(s);
      Event e;
      e.id = id;
      e.thread = slot.thread;
      e.index = slot.index;
      e.atomic = is_atomic(ins.kind);
      e.order = e.atomic ? ins.order : MemoryOrder::relaxed;
      e.location = ins.location;
      if (ins.kind == OpKind::fence) {
        e.kind = EventKind::fence;
      } else if (reads_memory(ins.kind)) {
        if (rf_[id] < 0) throw std::invalid_argument("instantiate: read without rf source");
        auto v = read(id);
        if (!v) return std::nullopt;
        e.read_value = *v;
        c.rf[id] = rf_[id];
        if (is_cas(ins.kind)) {
          auto w = written(id);
          if (w) {
            e.kind = EventKind::rmw;
            e.written_value = *w;
          } else {
            if (failed_) return std::nullopt;
            e.kind = EventKind::read;
            e.order = ins.failure_order;
          }
        } else if (is_rmw(ins.kind)) {
          auto w = written(id);
          if (!w) return std::nullopt;
          e.kind = EventKind::rmw;
          e.written_value = *w;
        } else {
          e.kind = EventKind::read;
        }
      } else {
        auto w = written(id);
        if (!w) return std::nullopt;
        e.kind = EventKind::write;
        e.written_value = *w;
      }
      c.events.push_back(e);
    }
    return c;
  }

 private:
  enum class State : std::uint8_t { unknown, busy, done, none };

  const Instruction& ins_of(EventId id) const { return *slots_.at(id - base_).ins; }

  // Value read by event `id`; nullopt on a thin-air cycle or a failed source.
  std::optional<Value> read(EventId id) {
    if (read_state_[id] == State::done) return read_value_[id];
    if (read_state_[id] == State::busy) return fail();
    read_state_[id] = State::busy;
    const EventId src = rf_[id];
    std::optional<Value> v;
    if (src >= 0 && src < base_) {
      if (src != ins_of(id).location) throw std::invalid_argument("instantiate: rf location mismatch");
      v = program_.initial.at(src);
    } else {
      if (src < 0 || static_cast<std::size_t>(src - base_) >= slots_.size()) {
        throw std::invalid_argument("instantiate: rf source out of range");
      }
      const Instruction& w = ins_of(src);
      if (!may_write_memory(w.kind) || w.location != ins_of(id).location) {
        throw std::invalid_argument("instantiate: rf source does not write the location");
      }
      v = written(src);
      if (!v) {
        failed_ = true;  // the source exists but is not a write (failed CAS)
        read_state_[id] = State::unknown;
        return std::nullopt;
      }
    }
    read_state_[id] = State::done;
    read_value_[id] = *v;
    return v;
  }

  // Value written by `id`; nullopt when it does not write (failed CAS) or
  // when it cannot be determined. `failed_` distinguishes the two.
  std::optional<Value> written(EventId id) {
    if (write_state_[id] == State::done) return write_value_[id];
    if (write_state_[id] == State::none) return std::nullopt;
    if (write_state_[id] == State::busy) return fail();
    write_state_[id] = State::busy;
    const Instruction& ins = ins_of(id);
    std::optional<Value> v;
    if (is_cas(ins.kind)) {
      auto old = read(id);
      if (!old) return abandon(id);
      const bool spurious = static_cast<std::size_t>(id) < spurious_.size() && spurious_[id];
      if (*old != ins.expected || spurious) {
        write_state_[id] = State::none;
        return std::nullopt;
      }
      v = ins.desired;
    } else {
      auto operand = operand_value(id);
      if (!operand) return abandon(id);
      if (is_rmw(ins.kind)) {
        auto old = read(id);
        if (!old) return abandon(id);
        v = apply_rmw(ins.kind, *old, *operand);
      } else {
        v = operand;
      }
    }
    write_state_[id] = State::done;
    write_value_[id] = *v;
    return v;
  }

  std::optional<Value> operand_value(EventId id) {
    const Instruction& ins = ins_of(id);
    if (!ins.operand.is_register) return ins.operand.literal;
    const auto& slot = slots_.at(id - base_);
    // The register holds what the latest earlier instruction loaded into it.
    for (int j = slot.index - 1; j >= 0; --j) {
      const EventId prev = id - (slot.index - j);
      const Instruction& p = ins_of(prev);
      if (has_destination(p.kind) && p.dest == ins.operand.reg) return read(prev);
    }
    return Value{0};
  }

  std::optional<Value> fail() {
    failed_ = true;
    return std::nullopt;
  }

  std::optional<Value> abandon(EventId id) {
    write_state_[id] = State::unknown;
    failed_ = true;
    return std::nullopt;
  }

  const Program& program_;
  const std::vector<EventId>& rf_;
  const std::vector<bool>& spurious_;
  std::vector<StaticSlot> slots_;
  EventId base_;
  std::vector<State> read_state_;
  std::vector<State> write_state_;
  std::vector<Value> read_value_;
  std::vector<Value> write_value_;
  bool failed_ = false;
};

}  // namespace

std::optional<CandidateExecution> instantiate(const Program& program,
                                              const std::vector<EventId>& rf_sources,
                                              const std::vector<bool>& spurious) {
  return ValueSolver(program, rf_sources, spurious).solve();
}

// ---------------------------------------------------------------------------
// Derived relations.

Relation compute_sb(const CandidateExecution& c) {
  Relation sb(c.events.size());
  for (const auto& a : c.events) {
    if (a.is_init()) continue;
    for (const auto& b : c.events) {
      if (b.thread == a.thread && a.index < b.index) sb.add(a.id, b.id);
    }
  }
  return sb;
}

namespace {

std::uint64_t release_sequence_mask(const CandidateExecution& c, EventId head) {
  const Event& h = c.events.at(head);
  const auto& order = c.mo.at(h.location);
  auto it = std::find(order.begin(), order.end(), head);
  if (it == order.end()) throw std::invalid_argument("release sequence head missing from mo");
  std::uint64_t mask = bit(head);
  for (++it; it != order.end(); ++it) {
    const Event& e = c.events[*it];
    const bool same_thread = e.atomic && e.thread == h.thread;
    if (!same_thread && e.kind != EventKind::rmw) break;
    mask |= bit(e.id);
  }
  return mask;
}

std::vector<EventId> mask_in_mo_order(const CandidateExecution& c, EventId head,
                                      std::uint64_t mask) {
  std::vector<EventId> out;
  for (EventId e : c.mo.at(c.events.at(head).location)) {
    if (mask & bit(e)) out.push_back(e);
  }
  return out;
}

bool is_atomic_write(const Event& e) { return e.atomic && !e.is_init() && e.writes(); }
bool is_atomic_read(const Event& e) { return e.atomic && !e.is_init() && e.reads(); }

}  // namespace

std::vector<EventId> hypothetical_release_sequence(const CandidateExecution& c, EventId head) {
  if (!is_atomic_write(c.events.at(head))) {
    throw std::invalid_argument("release sequence head must be an atomic write");
  }
  return mask_in_mo_order(c, head, release_sequence_mask(c, head));
}

std::vector<EventId> release_sequence(const CandidateExecution& c, EventId head) {
  if (!c.events.at(head).is_release_write()) {
    throw std::invalid_argument("release sequence head must be a release-class write");
  }
  return mask_in_mo_order(c, head, release_sequence_mask(c, head));
}

Relation compute_sw(const CandidateExecution& c) {
  const std::size_t n = c.events.size();
  Relation sw(n);
  std::vector<std::uint64_t> rs(n, 0);
  for (const auto& e : c.events) {
    if (is_atomic_write(e)) rs[e.id] = release_sequence_mask(c, e.id);
  }
  auto reads_from_sequence = [&](const Event& reader, EventId head) {
    const EventId src = c.rf[reader.id];
    return src >= 0 && (rs[head] & bit(src)) != 0;
  };
  auto sb = [](const Event& a, const Event& b) {
    return !a.is_init() && a.thread == b.thread && a.index < b.index;
  };

  for (const auto& a : c.events) {
    if (!a.is_release_write() && !a.is_release_fence()) continue;
    // Writes whose (hypothetical) release sequence carries A's release.
    std::vector<EventId> heads;
    if (a.is_release_write()) {
      heads.push_back(a.id);
    } else {
      for (const auto& x : c.events) {
        if (is_atomic_write(x) && sb(a, x)) heads.push_back(x.id);
      }
    }
    for (const auto& b : c.events) {
      if (b.is_init() || b.thread == a.thread) continue;
      bool edge = false;
      if (b.is_acquire_read()) {
        for (EventId h : heads) edge = edge || reads_from_sequence(b, h);
      } else if (b.is_acquire_fence()) {
        for (const auto& y : c.events) {
          if (!is_atomic_read(y) || !sb(y, b)) continue;
          for (EventId h : heads) edge = edge || reads_from_sequence(y, h);
        }
      }
      if (edge) sw.add(a.id, b.id);
    }
  }
  return sw;
}

namespace {

Relation hb_from(const CandidateExecution& c, const Relation& sb, const Relation& sw) {
  Relation base = unite(sb, sw);
  for (const auto& init : c.events) {
    if (!init.is_init()) continue;
    for (const auto& e : c.events) {
      if (!e.is_init()) base.add(init.id, e.id);
    }
  }
  return transitive_closure(base);
}

}  // namespace

Relation compute_hb(const CandidateExecution& c) {
  return hb_from(c, compute_sb(c), compute_sw(c));
}

std::vector<std::pair<EventId, EventId>> detect_races(const CandidateExecution& c,
                                                      const Relation& hb) {
  std::vector<std::pair<EventId, EventId>> races;
  for (const auto& a : c.events) {
    if (a.is_init() || a.kind == EventKind::fence) continue;
    for (const auto& b : c.events) {
      if (b.id <= a.id || b.is_init() || b.kind == EventKind::fence) continue;
      if (a.thread == b.thread || a.location != b.location) continue;
      if (!a.writes() && !b.writes()) continue;
      if (a.atomic && b.atomic) continue;
      if (hb.contains(a.id, b.id) || hb.contains(b.id, a.id)) continue;
      races.emplace_back(a.id, b.id);
    }
  }
  return races;
}

// ---------------------------------------------------------------------------
// Axioms.

namespace {

void check_well_formed(const CandidateExecution& c) {
  const std::size_t n = c.events.size();
  if (n > Relation::kMaxUniverse) throw std::invalid_argument("candidate has more than 64 events");
  if (c.rf.size() != n) throw std::invalid_argument("rf must have one entry per event");
  if (c.mo.size() != c.location_count) throw std::invalid_argument("mo must have one order per location");
  for (std::size_t i = 0; i < n; ++i) {
    const Event& e = c.events[i];
    if (e.id != static_cast<EventId>(i)) throw std::invalid_argument("event ids must match positions");
    const bool init_slot = i < c.location_count;
    if (init_slot != e.is_init() || (init_slot && (e.kind != EventKind::write ||
                                                   e.location != static_cast<int>(i)))) {
      throw std::invalid_argument("the first events must be the initial writes");
    }
    if (e.kind != EventKind::fence &&
        (e.location < 0 || static_cast<std::size_t>(e.location) >= c.location_count)) {
      throw std::invalid_argument("event location out of range");
    }
    if (e.reads()) {
      const EventId src = c.rf[i];
      if (src < 0 || static_cast<std::size_t>(src) >= n || !c.events[src].writes() ||
          c.events[src].location != e.location || src == e.id) {
        throw std::invalid_argument("rf source of event " + std::to_string(i) + " is not a write to its location");
      }
      if (c.events[src].written_value != e.read_value) {
        throw std::invalid_argument("rf value mismatch at event " + std::to_string(i));
      }
    } else if (c.rf[i] != -1) {
      throw std::invalid_argument("rf entry for a non-reading event");
    }
  }
  std::vector<int> seen(n, 0);
  for (std::size_t l = 0; l < c.location_count; ++l) {
    const auto& order = c.mo[l];
    if (order.empty() || order.front() != static_cast<EventId>(l)) {
      throw std::invalid_argument("mo must start with the initial write");
    }
    for (EventId e : order) {
      if (e < 0 || static_cast<std::size_t>(e) >= n || !c.events[e].writes() ||
          c.events[e].location != static_cast<int>(l) || seen[e]++) {
        throw std::invalid_argument("mo lists a non-write or a duplicate");
      }
    }
  }
  std::vector<int> in_s(n, 0);
  for (EventId e : c.sc_order) {
    if (e < 0 || static_cast<std::size_t>(e) >= n || !c.events[e].is_seq_cst() || in_s[e]++) {
      throw std::invalid_argument("S lists a non-seq_cst event or a duplicate");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (c.events[i].writes() && !seen[i]) throw std::invalid_argument("write missing from mo");
    if (c.events[i].is_seq_cst() && !in_s[i]) throw std::invalid_argument("seq_cst event missing from S");
  }
}

class Judge {
 public:
  Judge(const CandidateExecution& c, Relation sb, const AxiomOptions& options)
      : c_(c), options_(options), sb_(std::move(sb)), sw_(compute_sw(c)), hb_(hb_from(c, sb_, sw_)) {
    const std::size_t n = c.events.size();
    mo_pos_.assign(n, -1);
    for (const auto& order : c.mo) {
      for (std::size_t i = 0; i < order.size(); ++i) mo_pos_[order[i]] = static_cast<int>(i);
    }
    for (EventId a = 0; a < static_cast<EventId>(n); ++a) {
      if (hb_.contains(a, a)) hb_cyclic_ = true;
    }
    for (const auto& e : c.events) {
      if (e.is_seq_cst()) sc_events_.push_back(e.id);
    }
  }

  const Relation& sb() const { return sb_; }
  const Relation& sw() const { return sw_; }
  const Relation& hb() const { return hb_; }
  const std::vector<EventId>& sc_events() const { return sc_events_; }
  bool hb_cyclic() const { return hb_cyclic_; }

  /// Partial order S has to extend in strict mode.
  Relation s_constraint() const {
    Relation out(c_.events.size());
    if (!options_.strict_s) return out;
    for (EventId a : sc_events_) {
      for (EventId b : sc_events_) {
        if (a != b && (hb_.contains(a, b) || mo_before(a, b))) out.add(a, b);
      }
    }
    return out;
  }

  // Axioms not involving S. When hb is cyclic the axioms phrased over hb are
  // not evaluated: hb is then not an order and only the cycle is reported.
  void check_base(std::vector<std::string>& out) const {
    if (hb_cyclic_) {
      out.emplace_back(kHbIrreflexive);
    } else {
      if (violates_hb_mo()) out.emplace_back(kHbMo);
      if (violates_coherence()) out.emplace_back(kCoherentRead);
    }
    if (violates_rmw_immediate()) out.emplace_back(kRmwImmediate);
  }

  void check_total_order(std::span<const EventId> s, std::vector<std::string>& out) {
    std::fill(s_pos_.begin(), s_pos_.end(), -1);
    s_pos_.resize(c_.events.size(), -1);
    for (std::size_t i = 0; i < s.size(); ++i) s_pos_[s[i]] = static_cast<int>(i);
    if (!hb_cyclic_) {
      if (violates_sc_read()) out.emplace_back(kScRead);
    }
    if (violates_sc_fence_1()) out.emplace_back(kScFence1);
    if (violates_sc_fence_2()) out.emplace_back(kScFence2);
    if (violates_sc_fence_3()) out.emplace_back(kScFence3);
    if (violates_sc_fence_4()) out.emplace_back(kScFence4);
    if (options_.strict_s && !hb_cyclic_ && violates_s_consistency(s)) out.emplace_back(kSConsistent);
  }

 private:
  const Event& ev(EventId e) const { return c_.events[e]; }

  bool mo_before(EventId a, EventId b) const {
    return ev(a).writes() && ev(b).writes() && ev(a).location == ev(b).location &&
           mo_pos_[a] < mo_pos_[b];
  }

  bool violates_hb_mo() const {
    for (const auto& a : c_.events) {
      if (!a.writes()) continue;
      for (const auto& b : c_.events) {
        if (a.id != b.id && b.writes() && a.location == b.location && hb_.contains(a.id, b.id) &&
            mo_pos_[a.id] > mo_pos_[b.id]) {
          return true;
        }
      }
    }
    return false;
  }

  // Read coherence: a read may not see a write overwritten by one that
  // happens before it, nor anything at or after a write it happens before,
  // and hb-ordered reads of one location see mo-ordered writes.
  bool violates_coherence() const {
    for (const auto& b : c_.events) {
      if (!b.reads()) continue;
      const EventId src = c_.rf[b.id];
      for (const auto& w : c_.events) {
        if (!w.writes() || w.location != b.location || w.id == b.id) continue;
        if (hb_.contains(w.id, b.id) && mo_pos_[w.id] > mo_pos_[src]) return true;
        if (hb_.contains(b.id, w.id) && mo_pos_[src] >= mo_pos_[w.id]) return true;
      }
      for (const auto& b2 : c_.events) {
        if (b2.reads() && b2.location == b.location && hb_.contains(b.id, b2.id) &&
            mo_pos_[c_.rf[b2.id]] < mo_pos_[src]) {
          return true;
        }
      }
    }
    return false;
  }

  bool violates_rmw_immediate() const {
    for (const auto& b : c_.events) {
      if (b.kind == EventKind::rmw && mo_pos_[b.id] != mo_pos_[c_.rf[b.id]] + 1) return true;
    }
    return false;
  }

  // Last seq_cst write to `loc` strictly before S position `pos`, or -1.
  EventId last_sc_write_before(int loc, int pos, EventId exclude = -1) const {
    EventId best = -1;
    for (EventId w : sc_events_) {
      const Event& e = ev(w);
      if (w == exclude || !e.writes() || e.location != loc || s_pos_[w] >= pos) continue;
      if (best < 0 || s_pos_[w] > s_pos_[best]) best = w;
    }
    return best;
  }

  bool violates_sc_read() const {
    for (EventId b : sc_events_) {
      const Event& e = ev(b);
      if (!e.reads()) continue;
      const EventId src = c_.rf[b];
      const EventId last = last_sc_write_before(e.location, s_pos_[b], b);
      if (ev(src).is_seq_cst()) {
        if (src != last) return true;
      } else if (last >= 0 && hb_.contains(src, last)) {
        return true;
      }
    }
    return false;
  }

  bool sb(EventId a, EventId b) const { return sb_.contains(a, b); }

  std::vector<EventId> sc_fences() const {
    std::vector<EventId> out;
    for (EventId e : sc_events_) {
      if (ev(e).kind == EventKind::fence) out.push_back(e);
    }
    return out;
  }

  // Fence X sb read B: B sees the last seq_cst write before X, or later.
  bool violates_sc_fence_1() const {
    for (EventId x : sc_fences()) {
      for (const auto& b : c_.events) {
        if (!is_atomic_read(b) || !sb(x, b.id)) continue;
        const EventId w = last_sc_write_before(b.location, s_pos_[x], b.id);
        if (w >= 0 && mo_pos_[c_.rf[b.id]] < mo_pos_[w]) return true;
      }
    }
    return false;
  }

  // Write A sb fence X, seq_cst read B after X in S: B sees A or later.
  bool violates_sc_fence_2() const {
    for (EventId x : sc_fences()) {
      for (const auto& a : c_.events) {
        if (!is_atomic_write(a) || !sb(a.id, x)) continue;
        for (EventId b : sc_events_) {
          const Event& e = ev(b);
          if (b == a.id || !e.reads() || e.location != a.location || s_pos_[b] <= s_pos_[x]) continue;
          if (mo_pos_[c_.rf[b]] < mo_pos_[a.id]) return true;
        }
      }
    }
    return false;
  }

  template <class Visit>
  bool any_fence_pair(Visit&& visit) const {
    const auto fences = sc_fences();
    for (EventId x : fences) {
      for (EventId y : fences) {
        if (x != y && s_pos_[x] < s_pos_[y] && visit(x, y)) return true;
      }
    }
    return false;
  }

  // A sb X, Y sb B, X before Y in S: read B sees A or later.
  bool violates_sc_fence_3() const {
    return any_fence_pair([&](EventId x, EventId y) {
      for (const auto& a : c_.events) {
        if (!is_atomic_write(a) || !sb(a.id, x)) continue;
        for (const auto& b : c_.events) {
          if (b.id == a.id || !is_atomic_read(b) || b.location != a.location || !sb(y, b.id)) continue;
          if (mo_pos_[c_.rf[b.id]] < mo_pos_[a.id]) return true;
        }
      }
      return false;
    });
  }

  // A sb X, Y sb B, X before Y in S: write B is mo-after write A.
  bool violates_sc_fence_4() const {
    return any_fence_pair([&](EventId x, EventId y) {
      for (const auto& a : c_.events) {
        if (!is_atomic_write(a) || !sb(a.id, x)) continue;
        for (const auto& b : c_.events) {
          if (b.id == a.id || !is_atomic_write(b) || b.location != a.location || !sb(y, b.id)) continue;
          if (mo_pos_[a.id] > mo_pos_[b.id]) return true;
        }
      }
      return false;
    });
  }

  bool violates_s_consistency(std::span<const EventId> s) const {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        if (hb_.contains(s[j], s[i]) || mo_before(s[j], s[i])) return true;
      }
    }
    return false;
  }

  const CandidateExecution& c_;
  const AxiomOptions& options_;
  Relation sb_;
  Relation sw_;
  Relation hb_;
  std::vector<int> mo_pos_;
  std::vector<int> s_pos_;
  std::vector<EventId> sc_events_;
  bool hb_cyclic_ = false;
};

}  // namespace

ExecutionJudgment check_axioms(const CandidateExecution& c, const AxiomOptions& options) {
  check_well_formed(c);
  Judge judge(c, compute_sb(c), options);
  ExecutionJudgment j;
  judge.check_base(j.violated);
  judge.check_total_order(c.sc_order, j.violated);
  j.consistent = j.violated.empty();
  if (j.consistent) j.races = detect_races(c, judge.hb());
  j.sb = judge.sb();
  j.sw = judge.sw();
  j.hb = judge.hb();
  return j;
}

Outcome outcome_of(const Program& program, const CandidateExecution& c) {
  Outcome o;
  const auto base = static_cast<EventId>(program.locations.size());
  EventId id = base;
  for (const auto& thread : program.threads) {
    std::vector<Value> regs(thread.registers.size(), 0);
    for (const auto& ins : thread.code) {
      if (has_destination(ins.kind)) regs.at(ins.dest) = c.events.at(id).read_value;
      ++id;
    }
    o.registers.push_back(std::move(regs));
  }
  for (const auto& order : c.mo) o.memory.push_back(c.events.at(order.back()).written_value);
  return o;
}

// ---------------------------------------------------------------------------
// Enumeration.

namespace {

class Cxx11Explorer {
 public:
  Cxx11Explorer(const Program& program, const Cxx11Options& options)
      : program_(program), options_(options), axiom_options_{options.strict_s} {
    base_ = static_cast<EventId>(program.locations.size());
    slots_ = slots_of(program);
    const auto& slots = slots_;
    const std::size_t n = base_ + slots.size();
    if (n > Relation::kMaxUniverse) throw ResourceLimitError("events", Relation::kMaxUniverse);
    rf_.assign(n, -1);
    sources_.resize(n);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const EventId id = base_ + static_cast<EventId>(s);
      const Instruction& ins = *slots[s].ins;
      if (ins.kind == OpKind::cas_weak && options.weak_spurious) {
        weak_cas_.push_back(id);
      }
      if (!reads_memory(ins.kind)) continue;
      readers_.push_back(id);
      sources_[id].push_back(ins.location);
      for (std::size_t w = 0; w < slots.size(); ++w) {
        const Instruction& other = *slots[w].ins;
        if (w == s || !may_write_memory(other.kind) || other.location != ins.location) continue;
        // A read never observes a write of its own thread that comes after it.
        if (slots[w].thread == slots[s].thread && slots[w].index > slots[s].index) continue;
        sources_[id].push_back(base_ + static_cast<EventId>(w));
      }
    }
    spurious_.assign(n, false);
  }

  Cxx11Result run() {
    choose_rf(0);
    return std::move(result_);
  }

 private:
  void choose_rf(std::size_t k) {
    if (k == readers_.size()) {
      choose_spurious(0);
      return;
    }
    const EventId r = readers_[k];
    for (EventId src : sources_[r]) {
      rf_[r] = src;
      choose_rf(k + 1);
    }
    rf_[r] = -1;
  }

  void choose_spurious(std::size_t k) {
    if (k == weak_cas_.size()) {
      examine_rf();
      return;
    }
    spurious_[weak_cas_[k]] = false;
    choose_spurious(k + 1);
    spurious_[weak_cas_[k]] = true;
    choose_spurious(k + 1);
    spurious_[weak_cas_[k]] = false;
  }

  void examine_rf() {
    auto cand = instantiate(program_, rf_, spurious_);
    if (!cand) return;
    // A spurious failure only matters when the values matched; otherwise
    // this is a duplicate of the non-spurious choice.
    for (EventId id : weak_cas_) {
      if (spurious_[id] && cand->events[id].read_value != program_ins(id).expected) return;
    }
    if (!sb_) sb_ = compute_sb(*cand);
    cand->mo.assign(program_.locations.size(), {});
    std::vector<std::vector<EventId>> writers(program_.locations.size());
    for (const auto& e : cand->events) {
      if (!e.is_init() && e.writes()) writers[e.location].push_back(e.id);
    }
    choose_mo(*cand, writers, 0);
  }

  const Instruction& program_ins(EventId id) const { return *slots_.at(id - base_).ins; }

  void choose_mo(CandidateExecution& cand, std::vector<std::vector<EventId>>& writers,
                 std::size_t loc) {
    if (loc == writers.size()) {
      examine_candidate(cand);
      return;
    }
    auto& ws = writers[loc];
    std::sort(ws.begin(), ws.end());
    do {
      cand.mo[loc].clear();
      cand.mo[loc].push_back(static_cast<EventId>(loc));
      cand.mo[loc].insert(cand.mo[loc].end(), ws.begin(), ws.end());
      choose_mo(cand, writers, loc + 1);
    } while (std::next_permutation(ws.begin(), ws.end()));
  }

  void examine_candidate(CandidateExecution& cand) {
    if (++result_.candidates > options_.max_candidates) {
      throw ResourceLimitError("max-candidates", options_.max_candidates);
    }
    Judge judge(cand, *sb_, axiom_options_);
    std::vector<std::string> violated;
    judge.check_base(violated);
    if (!violated.empty()) return;

    const Relation constraint = judge.s_constraint();
    // hb and mo can disagree on seq_cst events; then no S fits.
    if (!is_irreflexive_and_acyclic(constraint)) return;
    bool found = false;
    for_each_linear_extension(constraint, judge.sc_events(), [&](std::span<const EventId> s) {
      violated.clear();
      judge.check_total_order(s, violated);
      if (!violated.empty()) return true;
      cand.sc_order.assign(s.begin(), s.end());
      found = true;
      return false;
    });
    if (!found) return;

    ++result_.consistent;
    Outcome outcome = outcome_of(program_, cand);
    auto races = detect_races(cand, judge.hb());
    if (!races.empty()) result_.racy_outcomes.insert(outcome);
    if (!races.empty() && !result_.outcomes.racy) {
      result_.outcomes.racy = true;
      result_.racy_witness = cand;
      result_.races = std::move(races);
    }
    if (result_.outcomes.outcomes.insert(outcome).second && options_.keep_witnesses) {
      result_.witnesses.emplace(std::move(outcome), cand);
    }
    cand.sc_order.clear();
  }

  const Program& program_;
  const Cxx11Options& options_;
  AxiomOptions axiom_options_;
  EventId base_ = 0;
  std::vector<StaticSlot> slots_;
  std::vector<EventId> readers_;
  std::vector<std::vector<EventId>> sources_;
  std::vector<EventId> weak_cas_;
  std::vector<EventId> rf_;
  std::vector<bool> spurious_;
  std::optional<Relation> sb_;
  Cxx11Result result_;
};

}  // namespace

Cxx11Result enumerate_cxx11(const Program& program, const Cxx11Options& options) {
  return Cxx11Explorer(program, options).run();
}

namespace {

std::string_view short_order(MemoryOrder o) {
  switch (o) {
    case MemoryOrder::relaxed:
      return "rlx";
    case MemoryOrder::consume:
      return "con";
    case MemoryOrder::acquire:
      return "acq";
    case MemoryOrder::release:
      return "rel";
    case MemoryOrder::acq_rel:
      return "acq_rel";
    case MemoryOrder::seq_cst:
      return "sc";
  }
  return "?";
}

}  // namespace

std::string describe_event(const Program& program, const Event& e) {
  std::ostringstream os;
  if (e.is_init()) {
    os << "init: W " << program.locations.at(e.location) << '=' << int(e.written_value);
    return os.str();
  }
  os << 'T' << e.thread << ": " << to_string(e.kind);
  if (e.kind != EventKind::fence) {
    os << ' ' << program.locations.at(e.location) << '=';
    switch (e.kind) {
      case EventKind::read:
        os << int(e.read_value);
        break;
      case EventKind::write:
        os << int(e.written_value);
        break;
      default:
        os << int(e.read_value) << "->" << int(e.written_value);
    }
  }
  os << ' ' << (e.atomic ? short_order(e.order) : std::string_view("na"));
  return os.str();
}

}  // namespace memlit
