#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "memlit/litmus.hpp"
#include "memlit/report.hpp"

namespace memlit {

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_stem(std::string_view name) {
  std::string out;
  for (char c : name) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_');
  }
  return out.empty() ? "test" : out;
}

bool write_file(const std::filesystem::path& path, const std::string& text, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    err << "memlit: cannot write " << path.string() << '\n';
    return false;
  }
  return true;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Litmus-test checker for SC, x86-TSO and the C++11 memory model", "memlit"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Run a litmus test under one or more models");
  std::string file;
  std::string model = "all";
  bool compare = false;
  std::string dot_dir;
  std::string json_file;
  RunOptions options;
  bool no_weak_spurious = false;
  check->add_option("file", file, "Litmus test file")->required();
  check->add_option("--model", model, "sc, tso, cxx11 or all")
      ->check(CLI::IsMember({"sc", "tso", "cxx11", "all"}));
  check->add_flag("--compare", compare, "Print a side-by-side comparison (runs every model)");
  check->add_option("--dot", dot_dir, "Write witness execution graphs to this directory");
  check->add_option("--max-states", options.max_states, "State limit for sc and tso");
  check->add_option("--max-candidates", options.max_candidates, "Candidate limit for cxx11");
  check->add_flag("--no-weak-spurious", no_weak_spurious, "Never let cas_weak fail spuriously");
  check->add_flag("--strict-s,!--no-strict-s", options.strict_s,
                  "Require S to agree with hb and mo (default on)");
  check->add_option("--json-ish", json_file, "Write a flat JSON summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  options.weak_spurious = !no_weak_spurious;
  options.keep_witnesses = !dot_dir.empty();
  if (!compare && model != "all") options.models = {*parse_model(model)};

  const auto text = read_file(file);
  if (!text) {
    err << "memlit: cannot read " << file << '\n';
    return kExitUsage;
  }
  const ParseResult parsed = parse_litmus(*text);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) err << format_parse_error(file, e) << '\n';
    return kExitUsage;
  }
  const Program& program = *parsed.program;
  const auto diagnostics = validate(program);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) err << file << ": " << format_diagnostic(program, d) << '\n';
    return kExitUsage;
  }
  const ExpectationParse expectations = parse_expectations(*text);
  for (const auto& e : expectations.errors) err << file << ": " << e << '\n';
  if (!expectations.errors.empty()) return kExitUsage;

  const RunReport report = run_program(program, options, expectations.expectations);
  print_report(out, program, report);
  if (compare) print_comparison(out, program, compare_models(report));

  if (!dot_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dot_dir, ec);
    const std::string stem = file_stem(program.name);
    for (const auto& r : report.models) {
      std::optional<std::string> dot;
      if (r.tso_trace) dot = export_dot(program, *r.tso_trace);
      if (r.cxx11_candidate) dot = export_dot(program, *r.cxx11_candidate);
      if (!dot) continue;
      const auto path = std::filesystem::path(dot_dir) / (stem + "." + std::string(to_string(r.model)) + ".dot");
      if (!write_file(path, *dot, err)) return kExitUsage;
      out << "wrote " << path.string() << '\n';
    }
  }
  if (!json_file.empty() && !write_file(json_file, summary_json(program, report), err)) {
    return kExitUsage;
  }
  return report.exit_code();
}

}  // namespace memlit
