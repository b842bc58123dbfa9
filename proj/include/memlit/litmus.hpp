#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memlit/program.hpp"

namespace memlit {

struct SourceSpan {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
  std::size_t begin = 0;   // byte offsets, begin <= end <= input size
  std::size_t end = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct ParseError {
  SourceSpan span;
  std::string message;
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<ParseError> errors;

  bool ok() const { return program.has_value(); }
};

// Line-oriented litmus format:
//
//   name: SB
//   init: x=0 y=0
//   thread P0:
//     store x 1 relaxed
//     r1 = load y relaxed
//   thread P1:
//     store y 1 relaxed
//     r2 = load x relaxed
//   exists: P0:r1=0 /\ P1:r2=0
//
// '#' starts a comment. Omitted memory orders default to seq_cst; a CAS with
// a single order derives its failure order.
ParseResult parse_litmus(std::string_view text);

/// Canonical text. parse_litmus(print_litmus(p)) reproduces p.
std::string print_litmus(const Program& program);

std::string print_instruction(const Thread& thread, const Program& program,
                              const Instruction& ins);
std::string print_formula(const Formula& formula);

std::string format_parse_error(std::string_view file, const ParseError& error);

}  // namespace memlit
