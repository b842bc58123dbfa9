#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace memlit {

using EventId = int;

/// Binary relation over the universe {0, ..., size-1}, at most 64 elements.
/// Each row is a successor bitset.
class Relation {
 public:
  static constexpr std::size_t kMaxUniverse = 64;

  Relation() = default;
  explicit Relation(std::size_t universe);

  std::size_t universe() const { return rows_.size(); }

  void add(EventId a, EventId b);
  void remove(EventId a, EventId b);
  bool contains(EventId a, EventId b) const;
  std::uint64_t successors(EventId a) const { return rows_.at(a); }
  std::uint64_t predecessors(EventId b) const;

  bool empty() const;
  std::size_t pair_count() const;
  std::vector<std::pair<EventId, EventId>> pairs() const;

  bool is_subset_of(const Relation& other) const;

  bool operator==(const Relation&) const = default;

 private:
  std::vector<std::uint64_t> rows_;
};

Relation transitive_closure(const Relation& r);

/// True iff the transitive closure of r has no (a, a) pair.
bool is_irreflexive_and_acyclic(const Relation& r);

Relation compose(const Relation& r, const Relation& s);
Relation unite(const Relation& r, const Relation& s);
/// Drops every pair with an endpoint outside `keep`.
Relation restrict(const Relation& r, const std::function<bool(EventId)>& keep);

/// Visits every total order of `elements` consistent with `partial`
/// (pairs outside `elements` are ignored), each exactly once, in
/// lexicographic order of positions in `elements`. The visitor returns false
/// to stop early. Returns false iff stopped early.
/// Throws std::invalid_argument when `partial` is cyclic on `elements`.
bool for_each_linear_extension(const Relation& partial, std::span<const EventId> elements,
                               const std::function<bool(std::span<const EventId>)>& visit);

std::vector<std::vector<EventId>> linear_extensions(const Relation& partial,
                                                    std::span<const EventId> elements);

}  // namespace memlit
