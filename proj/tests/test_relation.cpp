#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "memlit/relation.hpp"

using namespace memlit;

namespace {

// Oracle: reachability by repeated composition until a fixpoint.
Relation closure_oracle(const Relation& r) {
  const std::size_t n = r.universe();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (auto [a, b] : r.pairs()) reach[a][b] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (!reach[a][b]) continue;
        for (std::size_t c = 0; c < n; ++c) {
          if (reach[b][c] && !reach[a][c]) reach[a][c] = changed = true;
        }
      }
    }
  }
  Relation out(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (reach[a][b]) out.add(static_cast<EventId>(a), static_cast<EventId>(b));
    }
  }
  return out;
}

Relation random_relation(std::mt19937& rng, std::size_t n, double density) {
  Relation r(n);
  std::bernoulli_distribution coin(density);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (coin(rng)) r.add(static_cast<EventId>(a), static_cast<EventId>(b));
    }
  }
  return r;
}

// Oracle: filter all permutations.
std::vector<std::vector<EventId>> extensions_oracle(const Relation& r, std::vector<EventId> elems) {
  std::sort(elems.begin(), elems.end());
  std::vector<std::vector<EventId>> out;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < elems.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < elems.size() && ok; ++j) {
        if (r.contains(elems[j], elems[i])) ok = false;
      }
    }
    if (ok) out.push_back(elems);
  } while (std::next_permutation(elems.begin(), elems.end()));
  return out;
}

}  // namespace

TEST_CASE("basic membership") {
  Relation r(5);
  CHECK(r.empty());
  r.add(0, 1);
  r.add(1, 4);
  CHECK(r.contains(0, 1));
  CHECK_FALSE(r.contains(1, 0));
  CHECK(r.pair_count() == 2);
  CHECK(r.successors(1) == (std::uint64_t{1} << 4));
  CHECK(r.predecessors(1) == 1);
  r.remove(0, 1);
  CHECK_FALSE(r.contains(0, 1));
  CHECK(r.pairs() == std::vector<std::pair<EventId, EventId>>{{1, 4}});
  CHECK_THROWS_AS(r.add(0, 5), std::out_of_range);
  CHECK_THROWS_AS(r.add(7, 0), std::out_of_range);
  CHECK_THROWS_AS(Relation(65), std::length_error);
  Relation big(64);
  big.add(63, 0);
  big.add(0, 63);
  CHECK(transitive_closure(big).contains(63, 63));
}

TEST_CASE("closure of a 4-cycle is complete") {
  Relation r(4);
  for (int i = 0; i < 4; ++i) r.add(i, (i + 1) % 4);
  const Relation c = transitive_closure(r);
  CHECK(c.pair_count() == 16);
  CHECK_FALSE(is_irreflexive_and_acyclic(r));
  r.remove(3, 0);
  CHECK(transitive_closure(r).pair_count() == 6);
  CHECK(is_irreflexive_and_acyclic(r));
}

TEST_CASE("closure agrees with the fixpoint oracle") {
  std::mt19937 rng(99);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng() % 12;
    const Relation r = random_relation(rng, n, 0.15);
    const Relation c = transitive_closure(r);
    CHECK(c == closure_oracle(r));
    CHECK(r.is_subset_of(c));
    CHECK(transitive_closure(c) == c);
    bool acyclic = true;
    for (std::size_t a = 0; a < n; ++a) acyclic = acyclic && !c.contains(static_cast<EventId>(a), static_cast<EventId>(a));
    CHECK(is_irreflexive_and_acyclic(r) == acyclic);
  }
}

TEST_CASE("compose, unite, restrict") {
  Relation r(4), s(4);
  r.add(0, 1);
  r.add(2, 3);
  s.add(1, 2);
  s.add(3, 0);
  const Relation rs = compose(r, s);
  CHECK(rs.pairs() == std::vector<std::pair<EventId, EventId>>{{0, 2}, {2, 0}});
  CHECK(unite(r, s).pair_count() == 4);
  const Relation even = restrict(unite(r, s), [](EventId e) { return e != 3; });
  CHECK(even.pairs() == std::vector<std::pair<EventId, EventId>>{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(compose(r, Relation(3)), std::invalid_argument);
  CHECK_THROWS_AS(unite(r, Relation(5)), std::invalid_argument);

  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Relation a = random_relation(rng, 6, 0.3);
    const Relation b = random_relation(rng, 6, 0.3);
    const Relation ab = compose(a, b);
    for (int x = 0; x < 6; ++x) {
      for (int z = 0; z < 6; ++z) {
        bool via = false;
        for (int y = 0; y < 6; ++y) via = via || (a.contains(x, y) && b.contains(y, z));
        CHECK(ab.contains(x, z) == via);
      }
    }
  }
}

TEST_CASE("linear extensions of the empty order are all permutations") {
  for (int n = 0; n <= 6; ++n) {
    Relation r(8);
    std::vector<EventId> elems(static_cast<std::size_t>(n));
    std::iota(elems.begin(), elems.end(), 0);
    const auto all = linear_extensions(r, elems);
    int fact = 1;
    for (int k = 2; k <= n; ++k) fact *= k;
    CHECK(static_cast<int>(all.size()) == fact);
    CHECK(std::set<std::vector<EventId>>(all.begin(), all.end()).size() == all.size());
  }
}

TEST_CASE("linear extensions agree with filtered permutations") {
  std::mt19937 rng(17);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng() % 6;
    Relation r(n);
    // random DAG: only forward edges in a random labelling
    std::vector<EventId> label(n);
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), rng);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (rng() % 3 == 0) r.add(label[a], label[b]);
      }
    }
    std::vector<EventId> elems(n);
    std::iota(elems.begin(), elems.end(), 0);
    auto got = linear_extensions(r, elems);
    auto want = extensions_oracle(r, elems);
    CHECK(got == want);  // both lexicographic
  }
}

TEST_CASE("linear extensions on a subset ignore outside pairs") {
  Relation r(5);
  r.add(4, 0);  // 4 not among the elements
  r.add(2, 0);
  const std::vector<EventId> elems{0, 2, 3};
  const auto ext = linear_extensions(r, elems);
  CHECK(ext == std::vector<std::vector<EventId>>{{2, 0, 3}, {2, 3, 0}, {3, 2, 0}});
}

TEST_CASE("linear extension walker stops early and rejects cycles") {
  Relation r(4);
  const std::vector<EventId> elems{0, 1, 2, 3};
  int seen = 0;
  const bool completed = for_each_linear_extension(r, elems, [&](std::span<const EventId>) { return ++seen < 5; });
  CHECK_FALSE(completed);
  CHECK(seen == 5);
  r.add(0, 1);
  r.add(1, 0);
  CHECK_THROWS_AS(linear_extensions(r, elems), std::invalid_argument);
}
