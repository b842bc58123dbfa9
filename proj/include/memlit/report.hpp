#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "memlit/cxx11_model.hpp"
#include "memlit/program.hpp"
#include "memlit/tso_model.hpp"

namespace memlit {

enum class Model : std::uint8_t { sc, tso, cxx11 };

std::string_view to_string(Model m);
std::optional<Model> parse_model(std::string_view word);

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitLimit = 3;

struct RunOptions {
  std::vector<Model> models{Model::sc, Model::tso, Model::cxx11};
  std::size_t max_states = 1'000'000;
  std::size_t max_candidates = 1'000'000;
  bool weak_spurious = true;
  bool strict_s = true;
  bool keep_witnesses = false;  // needed for DOT export
};

struct ModelReport {
  Model model = Model::sc;
  OutcomeSet outcomes;
  AssertionResult assertion;
  std::size_t explored = 0;  // states (operational) or candidates (axiomatic)
  double seconds = 0.0;
  std::optional<std::string> limit_error;

  // Witness for the first assertion witness, or the first outcome.
  std::optional<Outcome> witness_outcome;
  std::optional<TsoTrace> tso_trace;
  std::optional<CandidateExecution> cxx11_candidate;
  std::vector<std::pair<EventId, EventId>> races;
  std::optional<CandidateExecution> racy_candidate;
  std::set<Outcome> racy_outcomes;
};

/// "# expected: <model> <verdict>" annotations, verdict being one of
/// allowed, forbidden, holds, violated, racy, race-free.
struct Expectation {
  Model model = Model::sc;
  std::string verdict;
  std::size_t line = 0;
};

struct ExpectationParse {
  std::vector<Expectation> expectations;
  std::vector<std::string> errors;
};

ExpectationParse parse_expectations(std::string_view text);

struct ExpectationCheck {
  Expectation expectation;
  std::string actual;
  bool matches = false;
};

struct RunReport {
  std::string program_name;
  std::vector<ModelReport> models;
  std::vector<ExpectationCheck> checks;
  std::vector<std::string> warnings;

  const ModelReport* find(Model m) const;
  bool limit_hit() const;
  bool all_expectations_match() const;
  int exit_code() const;
};

RunReport run_program(const Program& program, const RunOptions& options,
                      const std::vector<Expectation>& expectations = {});

/// Word an expectation about `m` is compared with: the assertion verdict,
/// or racy/race-free for race expectations on cxx11.
std::string actual_for(const ModelReport& report, std::string_view expected_word);

void print_report(std::ostream& os, const Program& program, const RunReport& report);

struct ComparisonRow {
  Model model;
  std::size_t outcome_count;
  Verdict verdict;
  bool racy;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  bool sc_in_tso = true;
  std::vector<Outcome> sc_not_in_tso;  // counterexamples to SC within TSO
};

Comparison compare_models(const RunReport& report);
void print_comparison(std::ostream& os, const Program& program, const Comparison& cmp);

/// Execution graph of an axiomatic candidate: sb (immediate), rf, mo
/// (immediate) and sw edges.
std::string export_dot(const Program& program, const CandidateExecution& candidate);

/// Execution graph of an operational TSO trace: one node per step,
/// program-order edges between a thread's executed instructions and
/// propagation edges from a buffered store to the step that drains it.
std::string export_dot(const Program& program, const TsoTrace& trace);

/// Flat key/value summary (a single JSON object).
std::string summary_json(const Program& program, const RunReport& report);

/// Entry point of the memlit command-line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace memlit
