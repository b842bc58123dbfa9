#include "memlit/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <functional>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "memlit/litmus.hpp"
#include "memlit/sc_model.hpp"

namespace memlit {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::sc:
      return "sc";
    case Model::tso:
      return "tso";
    case Model::cxx11:
      return "cxx11";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view word) {
  if (word == "sc") return Model::sc;
  if (word == "tso") return Model::tso;
  if (word == "cxx11") return Model::cxx11;
  return std::nullopt;
}

namespace {

bool known_expectation_word(std::string_view w) {
  return parse_verdict(w).has_value() || w == "racy" || w == "race-free";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ExpectationParse parse_expectations(std::string_view text) {
  ExpectationParse out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash == std::string_view::npos) continue;
    std::string_view comment = trim(line.substr(hash + 1));
    constexpr std::string_view kTag = "expected:";
    if (comment.substr(0, kTag.size()) != kTag) continue;
    std::istringstream words{std::string(comment.substr(kTag.size()))};
    std::string model_word, verdict_word, extra;
    words >> model_word >> verdict_word;
    const auto model = parse_model(model_word);
    if (!model || !known_expectation_word(verdict_word) || (words >> extra)) {
      out.errors.push_back("line " + std::to_string(line_no) + ": malformed expectation '" +
                           std::string(comment) + "'");
      continue;
    }
    out.expectations.push_back(Expectation{*model, verdict_word, line_no});
  }
  return out;
}

const ModelReport* RunReport::find(Model m) const {
  for (const auto& r : models) {
    if (r.model == m) return &r;
  }
  return nullptr;
}

bool RunReport::limit_hit() const {
  return std::any_of(models.begin(), models.end(),
                     [](const ModelReport& r) { return r.limit_error.has_value(); });
}

bool RunReport::all_expectations_match() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ExpectationCheck& c) { return c.matches; });
}

int RunReport::exit_code() const {
  if (limit_hit()) return kExitLimit;
  return all_expectations_match() ? kExitOk : kExitMismatch;
}

std::string actual_for(const ModelReport& report, std::string_view expected_word) {
  if (expected_word == "racy" || expected_word == "race-free") {
    return report.outcomes.racy ? "racy" : "race-free";
  }
  return std::string(to_string(report.assertion.verdict));
}

namespace {

template <class Fn>
double timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void pick_witness(ModelReport& r) {
  if (!r.assertion.witnesses.empty()) {
    r.witness_outcome = r.assertion.witnesses.front();
  } else if (!r.outcomes.outcomes.empty()) {
    r.witness_outcome = *r.outcomes.outcomes.begin();
  }
}

ModelReport run_model(const Program& program, Model model, const RunOptions& options) {
  ModelReport r;
  r.model = model;
  try {
    r.seconds = timed([&] {
      switch (model) {
        case Model::sc: {
          ScOptions o;
          o.weak_spurious = options.weak_spurious;
          o.max_states = options.max_states;
          auto res = enumerate_sc(program, o);
          r.outcomes = std::move(res.outcomes);
          r.explored = res.states;
          break;
        }
        case Model::tso: {
          TsoOptions o;
          o.weak_spurious = options.weak_spurious;
          o.max_states = options.max_states;
          o.record_traces = options.keep_witnesses;
          auto res = enumerate_tso(program, o);
          r.outcomes = std::move(res.outcomes);
          r.explored = res.states;
          r.assertion = eval_assertion(program, r.outcomes);
          pick_witness(r);
          if (r.witness_outcome && options.keep_witnesses) {
            r.tso_trace = res.traces.at(*r.witness_outcome);
          }
          break;
        }
        case Model::cxx11: {
          Cxx11Options o;
          o.weak_spurious = options.weak_spurious;
          o.strict_s = options.strict_s;
          o.max_candidates = options.max_candidates;
          o.keep_witnesses = options.keep_witnesses;
          auto res = enumerate_cxx11(program, o);
          r.outcomes = std::move(res.outcomes);
          r.explored = res.candidates;
          r.races = std::move(res.races);
          r.racy_candidate = std::move(res.racy_witness);
          r.racy_outcomes = std::move(res.racy_outcomes);
          r.assertion = eval_assertion(program, r.outcomes);
          pick_witness(r);
          if (r.witness_outcome && options.keep_witnesses) {
            r.cxx11_candidate = res.witnesses.at(*r.witness_outcome);
          }
          break;
        }
      }
    });
  } catch (const ResourceLimitError& e) {
    r.limit_error = e.what();
    r.outcomes = {};
  }
  r.assertion = eval_assertion(program, r.outcomes);
  if (!r.witness_outcome) pick_witness(r);
  return r;
}

}  // namespace

RunReport run_program(const Program& program, const RunOptions& options,
                      const std::vector<Expectation>& expectations) {
  RunReport report;
  report.program_name = program.name;
  // Backends share nothing but the immutable program.
  std::vector<std::future<ModelReport>> runs;
  for (Model m : options.models) {
    runs.push_back(std::async(std::launch::async, run_model, std::cref(program), m, std::cref(options)));
  }
  for (auto& run : runs) {
    report.models.push_back(run.get());
    const auto& r = report.models.back();
    if (r.limit_error) {
      report.warnings.push_back(std::string(to_string(r.model)) + ": " + *r.limit_error);
    }
  }
  for (const auto& e : expectations) {
    const ModelReport* r = report.find(e.model);
    if (!r) {
      report.warnings.push_back("expectation on line " + std::to_string(e.line) + " about " +
                                std::string(to_string(e.model)) + " ignored (model not run)");
      continue;
    }
    if (r->limit_error) continue;
    ExpectationCheck check{e, actual_for(*r, e.verdict), false};
    check.matches = check.actual == e.verdict;
    report.checks.push_back(std::move(check));
  }
  return report;
}

namespace {

std::string race_text(const Program& program, const CandidateExecution& c,
                      std::pair<EventId, EventId> race) {
  return describe_event(program, c.events.at(race.first)) + " <-> " +
         describe_event(program, c.events.at(race.second));
}

}  // namespace

void print_report(std::ostream& os, const Program& program, const RunReport& report) {
  os << "test " << report.program_name << '\n';
  os << "  assertion: "
     << (program.assertion.quantifier == Quantifier::exists ? "exists " : "forall ")
     << print_formula(program.assertion.formula) << '\n';
  for (const auto& r : report.models) {
    os << "  " << std::left << std::setw(6) << to_string(r.model);
    if (r.limit_error) {
      os << "LIMIT  " << *r.limit_error << '\n';
      continue;
    }
    os << std::setw(10) << to_string(r.assertion.verdict) << ' ' << r.outcomes.outcomes.size()
       << " outcome(s), " << r.explored
       << (r.model == Model::cxx11 ? " candidates" : " states") << ", " << std::fixed
       << std::setprecision(3) << r.seconds << "s\n";
    os.unsetf(std::ios::fixed);
    for (const auto& o : r.outcomes.outcomes) {
      os << "      " << format_outcome(program, o) << (r.racy_outcomes.count(o) ? "  [race]" : "")
         << '\n';
    }
    if (!r.assertion.witnesses.empty()) {
      os << "    " << (r.assertion.verdict == Verdict::allowed ? "witness: " : "counterexample: ")
         << format_outcome(program, r.assertion.witnesses.front()) << '\n';
    }
    if (r.model == Model::cxx11) {
      if (r.outcomes.racy) {
        os << "    data race: undefined behavior";
        if (r.racy_candidate && !r.races.empty()) {
          os << " (" << race_text(program, *r.racy_candidate, r.races.front()) << ')';
        }
        os << '\n';
      } else {
        os << "    no data race\n";
      }
    }
  }
  for (const auto& c : report.checks) {
    os << "  expected " << to_string(c.expectation.model) << ' ' << c.expectation.verdict
       << ": " << (c.matches ? "ok" : "MISMATCH (got " + c.actual + ")") << '\n';
  }
  for (const auto& w : report.warnings) os << "  warning: " << w << '\n';
}

Comparison compare_models(const RunReport& report) {
  Comparison cmp;
  for (const auto& r : report.models) {
    cmp.rows.push_back(ComparisonRow{r.model, r.outcomes.outcomes.size(), r.assertion.verdict,
                                     r.outcomes.racy});
  }
  const ModelReport* sc = report.find(Model::sc);
  const ModelReport* tso = report.find(Model::tso);
  if (sc && tso && !sc->limit_error && !tso->limit_error) {
    for (const auto& o : sc->outcomes.outcomes) {
      if (!tso->outcomes.outcomes.count(o)) cmp.sc_not_in_tso.push_back(o);
    }
    cmp.sc_in_tso = cmp.sc_not_in_tso.empty();
  }
  return cmp;
}

void print_comparison(std::ostream& os, const Program& program, const Comparison& cmp) {
  os << "model   outcomes  verdict    race\n";
  for (const auto& row : cmp.rows) {
    os << std::left << std::setw(8) << to_string(row.model) << std::setw(10) << row.outcome_count
       << std::setw(11) << to_string(row.verdict) << (row.racy ? "racy" : "-") << '\n';
  }
  os << "SC within TSO: " << (cmp.sc_in_tso ? "holds" : "FAILS") << '\n';
  for (const auto& o : cmp.sc_not_in_tso) {
    os << "  counterexample: " << format_outcome(program, o) << '\n';
  }
}

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string export_dot(const Program& program, const CandidateExecution& c) {
  std::ostringstream os;
  os << "digraph " << dot_quote(program.name) << " {\n";
  os << "  node [shape=box];\n";
  for (const auto& e : c.events) {
    if (e.is_init()) os << "  e" << e.id << " [label=" << dot_quote(describe_event(program, e)) << "];\n";
  }
  for (std::size_t t = 0; t < program.threads.size(); ++t) {
    os << "  subgraph cluster_" << t << " {\n    label=" << dot_quote(program.threads[t].name)
       << ";\n";
    for (const auto& e : c.events) {
      if (e.thread == static_cast<int>(t)) {
        os << "    e" << e.id << " [label=" << dot_quote(describe_event(program, e)) << "];\n";
      }
    }
    os << "  }\n";
  }
  auto edge = [&](EventId a, EventId b, std::string_view label, std::string_view style) {
    os << "  e" << a << " -> e" << b << " [label=\"" << label << "\"" << style << "];\n";
  };
  for (const auto& a : c.events) {
    for (const auto& b : c.events) {
      if (!a.is_init() && a.thread == b.thread && b.index == a.index + 1) edge(a.id, b.id, "sb", "");
    }
  }
  for (const auto& e : c.events) {
    if (e.reads() && c.rf[e.id] >= 0) edge(c.rf[e.id], e.id, "rf", ", color=red");
  }
  for (const auto& order : c.mo) {
    for (std::size_t i = 1; i < order.size(); ++i) edge(order[i - 1], order[i], "mo", ", color=blue");
  }
  for (const auto& [a, b] : compute_sw(c).pairs()) edge(a, b, "sw", ", color=darkgreen");
  os << "}\n";
  return os.str();
}

std::string export_dot(const Program& program, const TsoTrace& trace) {
  std::ostringstream os;
  os << "digraph " << dot_quote(program.name) << " {\n";
  os << "  node [shape=box];\n";
  std::ostringstream edges;
  TsoState state = tso_initial(program);
  const std::size_t n = program.threads.size();
  std::vector<int> last_exec(n, -1);
  std::vector<std::deque<int>> pending(n);  // steps whose stores are still buffered

  for (std::size_t k = 0; k < trace.size(); ++k) {
    const TsoStep& step = trace[k];
    const int t = step.transition.thread;
    const int node = static_cast<int>(k) + 1;
    std::ostringstream label;
    label << node << ". T" << t << ": ";
    const auto successors = tso_apply(program, state, step.transition);
    const TsoState& next = successors.at(step.branch);

    if (step.transition.kind == TsoTransition::Kind::dequeue) {
      const BufferedWrite& w = state.buffers[t].front();
      label << "D " << program.locations[w.location] << '=' << int(w.value) << " (dequeue)";
      edges << "  s" << pending[t].front() << " -> s" << node << " [label=\"propagation\", style=dashed];\n";
      pending[t].pop_front();
    } else {
      const Instruction& ins = program.threads[t].code[state.next[t]];
      const std::string loc = ins.location >= 0 ? program.locations[ins.location] : "";
      switch (ins.kind) {
        case OpKind::fence:
          label << "F " << to_string(ins.order);
          break;
        case OpKind::load:
        case OpKind::na_load:
          label << "R " << loc << '=' << int(next.registers[t][ins.dest]);
          break;
        case OpKind::store:
        case OpKind::na_store:
          label << "W " << loc << '=' << int(next.buffers[t].back().value) << " (buffered)";
          pending[t].push_back(node);
          break;
        default: {
          const Value old = next.registers[t][ins.dest];
          label << "RMW " << loc << '=' << int(old) << "->" << int(next.memory[ins.location])
                << " (locked)";
          for (int p : pending[t]) {
            edges << "  s" << p << " -> s" << node << " [label=\"propagation\", style=dashed];\n";
          }
          pending[t].clear();
        }
      }
      if (last_exec[t] >= 0) {
        edges << "  s" << last_exec[t] << " -> s" << node << " [label=\"program-order\"];\n";
      }
      last_exec[t] = node;
    }
    os << "  s" << node << " [label=" << dot_quote(label.str()) << "];\n";
    state = next;
  }
  os << edges.str() << "}\n";
  return os.str();
}

std::string summary_json(const Program& program, const RunReport& report) {
  nlohmann::ordered_json j;
  j["program"] = report.program_name;
  j["exit_code"] = report.exit_code();
  std::string models;
  for (const auto& r : report.models) {
    if (!models.empty()) models += ',';
    models += to_string(r.model);
  }
  j["models"] = models;
  for (const auto& r : report.models) {
    const std::string p = std::string(to_string(r.model)) + ".";
    j[p + "verdict"] = r.limit_error ? "limit" : std::string(to_string(r.assertion.verdict));
    j[p + "outcome_count"] = r.outcomes.outcomes.size();
    j[p + "explored"] = r.explored;
    j[p + "seconds"] = r.seconds;
    j[p + "racy"] = r.outcomes.racy;
    if (r.limit_error) j[p + "limit_error"] = *r.limit_error;
    auto outcomes = nlohmann::json::array();
    for (const auto& o : r.outcomes.outcomes) outcomes.push_back(format_outcome(program, o));
    j[p + "outcomes"] = outcomes;
    auto witnesses = nlohmann::json::array();
    for (const auto& o : r.assertion.witnesses) witnesses.push_back(format_outcome(program, o));
    j[p + "witnesses"] = witnesses;
    if (r.model == Model::cxx11) {
      auto races = nlohmann::json::array();
      if (r.racy_candidate) {
        for (const auto& race : r.races) races.push_back(race_text(program, *r.racy_candidate, race));
      }
      j[p + "races"] = races;
      auto racy = nlohmann::json::array();
      for (const auto& o : r.racy_outcomes) racy.push_back(format_outcome(program, o));
      j[p + "racy_outcomes"] = racy;
    }
  }
  j["expected.count"] = report.checks.size();
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const auto& c = report.checks[i];
    const std::string p = "expected." + std::to_string(i) + ".";
    j[p + "model"] = to_string(c.expectation.model);
    j[p + "verdict"] = c.expectation.verdict;
    j[p + "actual"] = c.actual;
    j[p + "matches"] = c.matches;
  }
  auto warnings = nlohmann::json::array();
  for (const auto& w : report.warnings) warnings.push_back(w);
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

}  // namespace memlit
