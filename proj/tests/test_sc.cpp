#include <doctest.h>

#include "memlit/sc_model.hpp"
#include "sc_oracle.hpp"
#include "test_support.hpp"

using namespace memlit;
using namespace memlit::testing;

namespace {

constexpr const char* kDekker = R"(name: dekker
init: x=0 y=0
thread P0:
  store x 1
  r1 = load y
thread P1:
  store y 1
  r2 = load x
exists: P0:r1=0 /\ P1:r2=0
)";

std::set<std::pair<int, int>> dekker_pairs(const OutcomeSet& s) {
  std::set<std::pair<int, int>> out;
  for (const auto& o : s.outcomes) out.emplace(o.registers[0][0], o.registers[1][0]);
  return out;
}

std::size_t multinomial(const Program& p) {
  std::size_t total = 0, result = 1;
  for (const auto& t : p.threads) {
    for (std::size_t k = 1; k <= t.code.size(); ++k) {
      ++total;
      result = result * total / k;
    }
  }
  return result;
}

}  // namespace

TEST_CASE("Dekker under SC") {
  const Program p = must_parse(kDekker);
  const auto r = enumerate_sc(p);
  CHECK(dekker_pairs(r.outcomes) == std::set<std::pair<int, int>>{{0, 1}, {1, 0}, {1, 1}});
  CHECK_FALSE(r.outcomes.racy);
  CHECK(eval_assertion(p, r.outcomes).verdict == Verdict::forbidden);
}

TEST_CASE("single thread has one outcome") {
  const Program p = must_parse("name: s\ninit: x=0\nthread P0:\n  store x 1\n  r1 = load x\nexists: x=1\n");
  const auto r = enumerate_sc(p);
  REQUIRE(r.outcomes.outcomes.size() == 1);
  CHECK(*r.outcomes.outcomes.begin() == Outcome{{{1}}, {1}});
}

TEST_CASE("sc_step") {
  const Program p = must_parse(R"(name: s
init: x=0
thread P0:
  store x 1
  r1 = load x
  r2 = cas_strong x 1 2
  r3 = cas_weak x 2 3
exists: x=0
)");
  ScState s = sc_initial(p);
  s = sc_step(p, s, 0).at(0);
  CHECK(s.memory[0] == 1);
  s.memory[0] = 5;
  s = sc_step(p, s, 0).at(0);
  CHECK(s.registers[0][0] == 5);
  s.memory[0] = 1;
  s = sc_step(p, s, 0).at(0);
  CHECK(s.memory[0] == 2);
  CHECK(s.registers[0][1] == 1);
  const auto weak = sc_step(p, s, 0);
  REQUIRE(weak.size() == 2);
  CHECK(weak[0].memory[0] == 3);
  CHECK(weak[1].memory[0] == 2);
  CHECK(weak[1].registers[0][2] == 2);
  CHECK(sc_step(p, s, 0, false).size() == 1);
  CHECK_THROWS_AS(sc_step(p, weak[0], 0), std::logic_error);
}

TEST_CASE("failed strong CAS leaves memory alone") {
  const Program p = must_parse("name: s\ninit: x=4\nthread P0:\n  r1 = cas_strong x 1 2\nexists: x=0\n");
  const auto r = enumerate_sc(p);
  REQUIRE(r.outcomes.outcomes.size() == 1);
  CHECK(*r.outcomes.outcomes.begin() == Outcome{{{4}}, {4}});
}

TEST_CASE("cas_weak spurious branch") {
  const Program p = must_parse("name: w\ninit: x=0\nthread P0:\n  r1 = cas_weak x 0 1\nexists: x=0\n");
  CHECK(enumerate_sc(p).outcomes.outcomes.size() == 2);
  ScOptions o;
  o.weak_spurious = false;
  CHECK(enumerate_sc(p, o).outcomes.outcomes.size() == 1);
}

TEST_CASE("interleaving count matches the multinomial") {
  const char* programs[] = {
      kDekker,
      "name: a\ninit: x=0\nthread P0:\n  store x 1\n  store x 2\n  store x 3\nthread P1:\n  r1 = load x\n  r2 = load x\nexists: x=0\n",
      "name: b\ninit: x=0\nthread P0:\n  store x 1\nthread P1:\n  store x 2\nthread P2:\n  r1 = load x\n  r2 = load x\nexists: x=0\n",
  };
  for (const char* text : programs) {
    const Program p = must_parse(text);
    ScOptions o;
    o.memoize = false;
    const auto r = enumerate_sc(p, o);
    CHECK(r.complete_paths == multinomial(p));
    CHECK(r.outcomes == enumerate_sc(p).outcomes);
  }
}

TEST_CASE("memoization visits fewer states than the tree") {
  const Program p = corpus_program("iriw_seq_cst.lit");
  ScOptions o;
  o.memoize = false;
  CHECK(enumerate_sc(p).states < enumerate_sc(p, o).states);
}

TEST_CASE("agrees with the schedule oracle on the corpus") {
  ScOptions o;
  o.weak_spurious = false;
  for (const auto& f : corpus_files()) {
    CAPTURE(f.string());
    const Program p = must_parse(read_text(f));
    CHECK(enumerate_sc(p, o).outcomes.outcomes == sc_by_schedules(p));
  }
}

TEST_CASE("thread renaming symmetry") {
  for (const auto& f : corpus_files()) {
    CAPTURE(f.string());
    const Program p = must_parse(read_text(f));
    Program q = p;
    std::reverse(q.threads.begin(), q.threads.end());
    std::set<Outcome> mapped;
    for (auto o : enumerate_sc(q).outcomes.outcomes) {
      std::reverse(o.registers.begin(), o.registers.end());
      mapped.insert(o);
    }
    CHECK(mapped == enumerate_sc(p).outcomes.outcomes);
  }
}

TEST_CASE("deterministic") {
  const Program p = corpus_program("wrc_relaxed.lit");
  CHECK(enumerate_sc(p).outcomes == enumerate_sc(p).outcomes);
}

TEST_CASE("state limit") {
  const Program p = corpus_program("iriw_seq_cst.lit");
  ScOptions o;
  o.max_states = 5;
  try {
    enumerate_sc(p, o);
    FAIL("expected a resource limit");
  } catch (const ResourceLimitError& e) {
    CHECK(e.limit() == "max-states");
  }
}

TEST_CASE("empty program") {
  Program p;
  p.name = "empty";
  const auto r = enumerate_sc(p);
  CHECK(r.outcomes.outcomes.size() == 1);
}
