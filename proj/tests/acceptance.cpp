// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cxx11_support.hpp"
#include "memlit/cxx11_model.hpp"
#include "memlit/litmus.hpp"
#include "memlit/report.hpp"
#include "memlit/sc_model.hpp"
#include "memlit/tso_model.hpp"
#include "test_support.hpp"

using namespace memlit;
using namespace memlit::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

template <typename F>
auto timed(const std::string& label, F&& f) {
  const auto start = Clock::now();
  auto r = f();
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  expect(s < 5.0, label + " took " + std::to_string(s) + " s");
  return r;
}

Verdict sc_verdict(const Program& p) {
  return eval_assertion(p, timed(p.name + " sc", [&] { return enumerate_sc(p); }).outcomes).verdict;
}
Verdict tso_verdict(const Program& p) {
  return eval_assertion(p, timed(p.name + " tso", [&] { return enumerate_tso(p); }).outcomes).verdict;
}
Verdict cxx11_verdict(const Program& p) {
  return eval_assertion(p, timed(p.name + " cxx11", [&] { return enumerate_cxx11(p); }).outcomes).verdict;
}

void expect_verdict(Verdict got, Verdict want, const std::string& what) {
  expect(got == want, what + ": got " + std::string(to_string(got)));
}

Ref E(int t, int i) { return Ref::ev(t, i); }
Ref I(const char* loc) { return Ref::initial(loc); }

void expect_only(const char* text, const CandidateSpec& bad, const CandidateSpec& good, std::string_view axiom) {
  const Program p = must_parse(text);
  const auto v = check_axioms(build(p, bad)).violated;
  expect(v == std::vector<std::string>{std::string(axiom)},
         std::string(axiom) + ": violated set has " + std::to_string(v.size()) + " entries");
  expect(check_axioms(build(p, good)).consistent, std::string(axiom) + ": control candidate rejected");
}

// ---------------------------------------------------------------------------

void dekker_suite() {
  const Program sc = corpus_program("dekker.lit");
  expect_verdict(sc_verdict(sc), Verdict::forbidden, "sc");
  expect_verdict(tso_verdict(sc), Verdict::allowed, "tso");
  expect_verdict(tso_verdict(corpus_program("dekker_mfence.lit")), Verdict::forbidden, "tso+mfence");
  expect_verdict(cxx11_verdict(sc), Verdict::forbidden, "cxx11 seq_cst");
  expect_verdict(cxx11_verdict(corpus_program("dekker_relaxed.lit")), Verdict::allowed, "cxx11 relaxed");
}

void message_passing() {
  expect_verdict(cxx11_verdict(corpus_program("mp_release_acquire.lit")), Verdict::forbidden, "rel/acq");
  expect_verdict(cxx11_verdict(corpus_program("mp_relaxed.lit")), Verdict::allowed, "relaxed");
  expect_verdict(cxx11_verdict(corpus_program("mp_fences.lit")), Verdict::forbidden, "fences");
}

void release_sequences() {
  const Program rs = corpus_program("release_sequence.lit");
  expect_verdict(cxx11_verdict(rs), Verdict::forbidden, "release sequence");
  // r1 reads the relaxed store of 2; sw still runs from the release head
  const auto c = build(rs, {{{E(1, 0), E(0, 2)}, {E(1, 1), E(0, 0)}},
                            {{"d", {E(0, 0)}}, {"f", {E(0, 1), E(0, 2)}}}, {}, {}});
  const EventId head = event_id(rs, 0, 1), tail = event_id(rs, 0, 2), acq = event_id(rs, 1, 0);
  expect(release_sequence(c, head) == std::vector<EventId>{head, tail}, "release sequence membership");
  expect(compute_sw(c).contains(head, acq), "no sw from the head");
  expect(check_axioms(c).consistent, "synchronizing candidate rejected");

  const Program cas = corpus_program("cas_two_threads.lit");
  expect_verdict(cxx11_verdict(cas), Verdict::forbidden, "two CAS");
  const auto d = build(cas, {{{E(1, 0), E(0, 1)}, {E(1, 1), E(0, 0)}, {E(2, 0), E(1, 0)}, {E(2, 1), E(0, 0)}},
                             {{"d", {E(0, 0)}}, {"f", {E(0, 1), E(1, 0), E(2, 0)}}}, {}, {}});
  const Relation sw = compute_sw(d);
  const EventId rel = event_id(cas, 0, 1);
  expect(sw.contains(rel, event_id(cas, 1, 0)), "head does not sync with the first CAS");
  expect(sw.contains(rel, event_id(cas, 2, 0)), "head does not sync with the second CAS");
}

void races() {
  const Program racy = corpus_program("race_na.lit");
  const auto r = enumerate_cxx11(racy);
  expect(r.racy_witness.has_value() && !r.races.empty(), "race not flagged");
  RunOptions o;
  o.models = {Model::cxx11};
  std::ostringstream out;
  print_report(out, racy, run_program(racy, o));
  expect(out.str().find("data race: undefined behavior") != std::string::npos, "report does not say undefined behavior");

  // the handoff, in the execution where the acquire sees the release
  const Program h = corpus_program("race_handoff.lit");
  const auto c = build(h, {{{E(1, 0), E(0, 1)}, {E(1, 1), E(0, 0)}}, {{"d", {E(0, 0)}}, {"f", {E(0, 1)}}}, {}, {}});
  const auto j = check_axioms(c);
  expect(j.consistent, "handoff candidate rejected");
  expect(j.races.empty() && detect_races(c, compute_hb(c)).empty(), "races reported on the handoff");
  const auto all = enumerate_cxx11(h);
  for (const auto& oc : all.outcomes.outcomes) {
    if (oc.registers[1][0] == 1) expect(!all.racy_outcomes.count(oc), "synchronized outcome marked racy");
  }

  // same candidate with a relaxed flag does race
  Program weak = h;
  weak.threads[0].code[1].order = MemoryOrder::relaxed;
  weak.threads[1].code[0].order = MemoryOrder::relaxed;
  const auto cw = build(weak, {{{E(1, 0), E(0, 1)}, {E(1, 1), E(0, 0)}}, {{"d", {E(0, 0)}}, {"f", {E(0, 1)}}}, {}, {}});
  expect(!detect_races(cw, compute_hb(cw)).empty(), "relaxed handoff reports no race");
}

void oracle_equivalence() {
  const auto files = corpus_files();
  expect(files.size() >= 20, "corpus has only " + std::to_string(files.size()) + " programs");
  for (const auto& f : files) {
    const Program p = strengthen_to_seq_cst(must_parse(read_text(f)));
    expect(enumerate_cxx11(p).outcomes.outcomes == enumerate_sc(p).outcomes.outcomes,
           f.filename().string() + " differs");
  }
}

void inclusion() {
  bool strict_sb = false;
  for (const auto& f : corpus_files()) {
    const Program p = must_parse(read_text(f));
    const auto sc = enumerate_sc(p).outcomes.outcomes;
    const auto tso = enumerate_tso(p).outcomes.outcomes;
    expect(std::includes(tso.begin(), tso.end(), sc.begin(), sc.end()), f.filename().string() + ": SC not within TSO");
    if (p.name == "dekker" && tso.size() > sc.size()) strict_sb = true;
  }
  expect(strict_sb, "SB inclusion is not strict");
}

void iriw() {
  const Program p = corpus_program("iriw_seq_cst.lit");
  expect_verdict(cxx11_verdict(p), Verdict::forbidden, "cxx11");
  expect_verdict(tso_verdict(p), Verdict::forbidden, "tso");
}

void axioms() {
  expect_only("name: a\ninit: x=0 y=0\nthread P0:\n  r1 = load x acquire\n  store y 1 release\n"
              "thread P1:\n  r2 = load y acquire\n  store x 1 release\nexists: x=0\n",
              {{{E(0, 0), E(1, 1)}, {E(1, 0), E(0, 1)}}, {{"x", {E(1, 1)}}, {"y", {E(0, 1)}}}, {}, {}},
              {{{E(0, 0), I("x")}, {E(1, 0), E(0, 1)}}, {{"x", {E(1, 1)}}, {"y", {E(0, 1)}}}, {}, {}},
              kHbIrreflexive);
  expect_only("name: a\ninit: x=0 y=0\nthread P0:\n  store x 1 relaxed\n  store y 1 release\n"
              "thread P1:\n  r1 = load y acquire\n  store x 2 relaxed\nexists: x=0\n",
              {{{E(1, 0), E(0, 1)}}, {{"x", {E(1, 1), E(0, 0)}}, {"y", {E(0, 1)}}}, {}, {}},
              {{{E(1, 0), E(0, 1)}}, {{"x", {E(0, 0), E(1, 1)}}, {"y", {E(0, 1)}}}, {}, {}}, kHbMo);
  expect_only("name: a\ninit: x=0 y=0\nthread P0:\n  store x 1 relaxed\n  store y 2 release\n"
              "thread P1:\n  r1 = load y acquire\n  r2 = load x relaxed\nexists: x=0\n",
              {{{E(1, 0), E(0, 1)}, {E(1, 1), I("x")}}, {{"x", {E(0, 0)}}, {"y", {E(0, 1)}}}, {}, {}},
              {{{E(1, 0), E(0, 1)}, {E(1, 1), E(0, 0)}}, {{"x", {E(0, 0)}}, {"y", {E(0, 1)}}}, {}, {}},
              kCoherentRead);
  expect_only("name: a\ninit: x=0\nthread P0:\n  store x 1\nthread P1:\n  r1 = load x\nexists: x=0\n",
              {{{E(1, 0), I("x")}}, {{"x", {E(0, 0)}}}, {E(0, 0), E(1, 0)}, {}},
              {{{E(1, 0), I("x")}}, {{"x", {E(0, 0)}}}, {E(1, 0), E(0, 0)}, {}}, kScRead);
  expect_only("name: a\ninit: x=0\nthread P0:\n  store x 1 relaxed\nthread P1:\n  r1 = exchange x 2 relaxed\nexists: x=0\n",
              {{{E(1, 0), I("x")}}, {{"x", {E(0, 0), E(1, 0)}}}, {}, {}},
              {{{E(1, 0), I("x")}}, {{"x", {E(1, 0), E(0, 0)}}}, {}, {}}, kRmwImmediate);
  expect_only("name: a\ninit: x=0\nthread P0:\n  store x 1 seq_cst\nthread P1:\n  fence seq_cst\n  r1 = load x relaxed\nexists: x=0\n",
              {{{E(1, 1), I("x")}}, {{"x", {E(0, 0)}}}, {E(0, 0), E(1, 0)}, {}},
              {{{E(1, 1), I("x")}}, {{"x", {E(0, 0)}}}, {E(1, 0), E(0, 0)}, {}}, kScFence1);
  expect_only("name: a\ninit: x=0\nthread P0:\n  store x 1 relaxed\n  fence seq_cst\nthread P1:\n  r1 = load x seq_cst\nexists: x=0\n",
              {{{E(1, 0), I("x")}}, {{"x", {E(0, 0)}}}, {E(0, 1), E(1, 0)}, {}},
              {{{E(1, 0), I("x")}}, {{"x", {E(0, 0)}}}, {E(1, 0), E(0, 1)}, {}}, kScFence2);
  expect_only("name: a\ninit: x=0\nthread P0:\n  store x 1 relaxed\n  fence seq_cst\n"
              "thread P1:\n  fence seq_cst\n  r1 = load x relaxed\nexists: x=0\n",
              {{{E(1, 1), I("x")}}, {{"x", {E(0, 0)}}}, {E(0, 1), E(1, 0)}, {}},
              {{{E(1, 1), I("x")}}, {{"x", {E(0, 0)}}}, {E(1, 0), E(0, 1)}, {}}, kScFence3);
  expect_only("name: a\ninit: x=0\nthread P0:\n  store x 1 relaxed\n  fence seq_cst\n"
              "thread P1:\n  fence seq_cst\n  store x 2 relaxed\nexists: x=0\n",
              {{}, {{"x", {E(1, 1), E(0, 0)}}}, {E(0, 1), E(1, 0)}, {}},
              {{}, {{"x", {E(0, 0), E(1, 1)}}}, {E(0, 1), E(1, 0)}, {}}, kScFence4);
}

void parser() {
  for (const auto& f : corpus_files()) {
    const Program p = must_parse(read_text(f));
    const std::string text = print_litmus(p);
    expect(must_parse(text) == p && print_litmus(must_parse(text)) == text,
           f.filename().string() + " does not round-trip");
  }
  std::mt19937 rng(20261018);
  std::uniform_int_distribution<int> len(0, 256), byte(0, 255);
  for (int i = 0; i < 10'000; ++i) {
    std::string s(static_cast<std::size_t>(len(rng)), '\0');
    for (auto& c : s) c = static_cast<char>(byte(rng));
    const ParseResult r = parse_litmus(s);
    expect(!r.ok() && !r.errors.empty(), "random input #" + std::to_string(i) + " parsed");
  }
}

void whole_corpus() {
  const auto start = Clock::now();
  for (const auto& f : corpus_files()) {
    const Program p = must_parse(read_text(f));
    const auto e = parse_expectations(read_text(f));
    const auto r = timed(f.filename().string(), [&] { return run_program(p, RunOptions{}, e.expectations); });
    expect(r.exit_code() == kExitOk, f.filename().string() + " exit " + std::to_string(r.exit_code()));
  }
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  expect(s < 120.0, "corpus took " + std::to_string(s) + " s");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"Dekker suite", dekker_suite},
      {"message passing", message_passing},
      {"release sequences and two CAS", release_sequences},
      {"race detection", races},
      {"seq_cst cxx11 equals SC on the corpus", oracle_equivalence},
      {"SC within TSO, strict on SB", inclusion},
      {"IRIW seq_cst forbidden", iriw},
      {"axiom isolation", axioms},
      {"parser round-trip and fuzz", parser},
      {"whole corpus under 2 minutes", whole_corpus},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    try {
      criteria[i].second();
    } catch (const Failure& f) {
      detail = f.what;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (detail.empty() ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << '\n';
    if (!detail.empty()) ++failures;
  }
  return failures;
}
