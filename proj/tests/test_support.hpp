#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "memlit/litmus.hpp"
#include "memlit/program.hpp"

namespace memlit::testing {

inline Program must_parse(std::string_view text) {
  ParseResult r = parse_litmus(text);
  if (!r.ok()) {
    std::string msg = "parse failed:";
    for (const auto& e : r.errors) msg += "\n  " + format_parse_error("<test>", e);
    throw std::runtime_error(msg);
  }
  return *r.program;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(MEMLIT_CORPUS_DIR)) {
    if (entry.path().extension() == ".lit") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline Program corpus_program(std::string_view file) {
  return must_parse(read_text(std::filesystem::path(MEMLIT_CORPUS_DIR) / file));
}

inline Outcome outcome(std::vector<std::vector<Value>> regs, std::vector<Value> mem) {
  return Outcome{std::move(regs), std::move(mem)};
}

}  // namespace memlit::testing
