#include "memlit/relation.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace memlit {

namespace {

std::uint64_t bit(EventId e) { return std::uint64_t{1} << e; }

void require_same_universe(const Relation& r, const Relation& s) {
  if (r.universe() != s.universe()) {
    throw std::invalid_argument("relation universes differ: " + std::to_string(r.universe()) +
                                " vs " + std::to_string(s.universe()));
  }
}

}  // namespace

Relation::Relation(std::size_t universe) {
  if (universe > kMaxUniverse) {
    throw std::length_error("relation universe exceeds 64 elements");
  }
  rows_.assign(universe, 0);
}

void Relation::add(EventId a, EventId b) {
  if (b < 0 || static_cast<std::size_t>(b) >= rows_.size()) {
    throw std::out_of_range("relation element out of universe");
  }
  rows_.at(a) |= bit(b);
}

void Relation::remove(EventId a, EventId b) { rows_.at(a) &= ~bit(b); }

bool Relation::contains(EventId a, EventId b) const { return (rows_.at(a) & bit(b)) != 0; }

std::uint64_t Relation::predecessors(EventId b) const {
  std::uint64_t out = 0;
  for (std::size_t a = 0; a < rows_.size(); ++a) {
    if (rows_[a] & bit(b)) out |= bit(static_cast<EventId>(a));
  }
  return out;
}

bool Relation::empty() const {
  for (auto row : rows_) {
    if (row) return false;
  }
  return true;
}

std::size_t Relation::pair_count() const {
  std::size_t n = 0;
  for (auto row : rows_) n += static_cast<std::size_t>(std::popcount(row));
  return n;
}

std::vector<std::pair<EventId, EventId>> Relation::pairs() const {
  std::vector<std::pair<EventId, EventId>> out;
  for (std::size_t a = 0; a < rows_.size(); ++a) {
    for (std::uint64_t row = rows_[a]; row; row &= row - 1) {
      out.emplace_back(static_cast<EventId>(a), std::countr_zero(row));
    }
  }
  return out;
}

bool Relation::is_subset_of(const Relation& other) const {
  require_same_universe(*this, other);
  for (std::size_t a = 0; a < rows_.size(); ++a) {
    if (rows_[a] & ~other.rows_[a]) return false;
  }
  return true;
}

Relation transitive_closure(const Relation& r) {
  // Warshall over bitset rows.
  Relation out = r;
  const auto n = static_cast<EventId>(r.universe());
  for (EventId k = 0; k < n; ++k) {
    const std::uint64_t via = out.successors(k);
    for (EventId a = 0; a < n; ++a) {
      if (out.contains(a, k)) {
        for (std::uint64_t row = via; row; row &= row - 1) out.add(a, std::countr_zero(row));
      }
    }
  }
  return out;
}

bool is_irreflexive_and_acyclic(const Relation& r) {
  const Relation tc = transitive_closure(r);
  for (EventId a = 0; a < static_cast<EventId>(tc.universe()); ++a) {
    if (tc.contains(a, a)) return false;
  }
  return true;
}

Relation compose(const Relation& r, const Relation& s) {
  require_same_universe(r, s);
  Relation out(r.universe());
  for (EventId a = 0; a < static_cast<EventId>(r.universe()); ++a) {
    for (std::uint64_t mid = r.successors(a); mid; mid &= mid - 1) {
      for (std::uint64_t row = s.successors(std::countr_zero(mid)); row; row &= row - 1) {
        out.add(a, std::countr_zero(row));
      }
    }
  }
  return out;
}

Relation unite(const Relation& r, const Relation& s) {
  require_same_universe(r, s);
  Relation out = r;
  for (const auto& [a, b] : s.pairs()) out.add(a, b);
  return out;
}

Relation restrict(const Relation& r, const std::function<bool(EventId)>& keep) {
  Relation out(r.universe());
  for (const auto& [a, b] : r.pairs()) {
    if (keep(a) && keep(b)) out.add(a, b);
  }
  return out;
}

namespace {

class ExtensionWalker {
 public:
  ExtensionWalker(const Relation& partial, std::span<const EventId> elements,
                  const std::function<bool(std::span<const EventId>)>& visit)
      : elements_(elements), visit_(visit) {
    for (EventId e : elements_) members_ |= bit(e);
    preds_.resize(partial.universe());
    for (EventId e : elements_) preds_[e] = partial.predecessors(e) & members_;
    order_.reserve(elements_.size());
  }

  bool walk() {
    if (order_.size() == elements_.size()) return visit_(order_);
    for (EventId e : elements_) {
      if (placed_ & bit(e)) continue;
      // Every in-set predecessor must already be placed.
      if (preds_[e] & ~placed_) continue;
      placed_ |= bit(e);
      order_.push_back(e);
      const bool go_on = walk();
      order_.pop_back();
      placed_ &= ~bit(e);
      if (!go_on) return false;
    }
    return true;
  }

 private:
  std::span<const EventId> elements_;
  const std::function<bool(std::span<const EventId>)>& visit_;
  std::uint64_t members_ = 0;
  std::uint64_t placed_ = 0;
  std::vector<std::uint64_t> preds_;
  std::vector<EventId> order_;
};

}  // namespace

bool for_each_linear_extension(const Relation& partial, std::span<const EventId> elements,
                               const std::function<bool(std::span<const EventId>)>& visit) {
  std::uint64_t members = 0;
  for (EventId e : elements) {
    if (e < 0 || static_cast<std::size_t>(e) >= partial.universe()) {
      throw std::out_of_range("linear extension element outside the universe");
    }
    if (members & bit(e)) throw std::invalid_argument("duplicate element in linear extension set");
    members |= bit(e);
  }
  const Relation inner = restrict(partial, [&](EventId e) { return (members & bit(e)) != 0; });
  if (!is_irreflexive_and_acyclic(inner)) {
    throw std::invalid_argument("linear extensions requested for a cyclic relation");
  }
  return ExtensionWalker(inner, elements, visit).walk();
}

std::vector<std::vector<EventId>> linear_extensions(const Relation& partial,
                                                    std::span<const EventId> elements) {
  std::vector<std::vector<EventId>> out;
  for_each_linear_extension(partial, elements, [&](std::span<const EventId> order) {
    out.emplace_back(order.begin(), order.end());
    return true;
  });
  return out;
}

}  // namespace memlit
