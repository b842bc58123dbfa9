#include "memlit/litmus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace memlit {

namespace {

enum class Tok : std::uint8_t { ident, number, colon, equals, lparen, rparen, bang, conj, disj };

struct Token {
  Tok kind;
  std::string_view text;
  SourceSpan span;
  unsigned value = 0;  // numbers, saturated at 256
};

constexpr std::array<std::string_view, 5> kSectionWords = {"name", "init", "thread", "exists",
                                                           "forall"};

bool is_reserved(std::string_view word) {
  return parse_op_kind(word).has_value() || parse_memory_order(word).has_value() ||
         std::find(kSectionWords.begin(), kSectionWords.end(), word) != kSectionWords.end();
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return ident_char(c) || c == '.' || c == '+' || c == '-'; }

struct Line {
  std::size_t number;  // 1-based
  std::size_t offset;  // byte offset of the first character
  std::string_view body;  // comment stripped
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run() {
    split_lines();
    parse_sections();
    ParseResult result;
    result.errors = std::move(errors_);
    if (result.errors.empty()) result.program = std::move(program_);
    return result;
  }

 private:
  // --- lexing -------------------------------------------------------------

  void split_lines() {
    std::size_t pos = 0;
    std::size_t number = 1;
    while (pos <= text_.size()) {
      std::size_t nl = text_.find('\n', pos);
      if (nl == std::string_view::npos) nl = text_.size();
      std::string_view body = text_.substr(pos, nl - pos);
      if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
      lines_.push_back(Line{number, pos, body});
      pos = nl + 1;
      ++number;
    }
  }

  SourceSpan span_at(const Line& line, std::size_t col, std::size_t len) const {
    const std::size_t begin = std::min(line.offset + col, text_.size());
    const std::size_t end = std::min(begin + len, text_.size());
    return SourceSpan{line.number, col + 1, begin, end};
  }

  SourceSpan end_of_line(const Line& line) const { return span_at(line, line.body.size(), 0); }

  void error(SourceSpan span, std::string message) {
    errors_.push_back(ParseError{span, std::move(message)});
  }

  // Returns false (after reporting) when the line contains a bad character.
  bool tokenize(const Line& line, std::vector<Token>& out) {
    const std::string_view s = line.body;
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++i;
        continue;
      }
      const std::size_t start = i;
      Token tok{Tok::ident, {}, {}};
      if (ident_start(c)) {
        while (i < s.size() && ident_char(s[i])) ++i;
        tok.kind = Tok::ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        unsigned v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
          v = std::min(256u, v * 10 + static_cast<unsigned>(s[i] - '0'));
          ++i;
        }
        tok.kind = Tok::number;
        tok.value = v;
      } else if (c == ':') {
        tok.kind = Tok::colon, ++i;
      } else if (c == '=') {
        tok.kind = Tok::equals, ++i;
      } else if (c == '(') {
        tok.kind = Tok::lparen, ++i;
      } else if (c == ')') {
        tok.kind = Tok::rparen, ++i;
      } else if (c == '!') {
        tok.kind = Tok::bang, ++i;
      } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '\\') {
        tok.kind = Tok::conj, i += 2;
      } else if (c == '\\' && i + 1 < s.size() && s[i + 1] == '/') {
        tok.kind = Tok::disj, i += 2;
      } else {
        error(span_at(line, start, 1), "unexpected character");
        return false;
      }
      tok.text = s.substr(start, i - start);
      tok.span = span_at(line, start, i - start);
      out.push_back(tok);
    }
    return true;
  }

  static bool is_word(const std::vector<Token>& toks, std::size_t i, std::string_view w) {
    return i < toks.size() && toks[i].kind == Tok::ident && toks[i].text == w;
  }

  static bool is_kind(const std::vector<Token>& toks, std::size_t i, Tok k) {
    return i < toks.size() && toks[i].kind == k;
  }

  // --- sections -----------------------------------------------------------

  enum class Section { name, init, threads, condition };

  void parse_sections() {
    Section section = Section::name;
    bool saw_thread = false;
    bool saw_condition = false;
    std::vector<Token> cond_tokens;
    SourceSpan cond_span;

    for (const Line& line : lines_) {
      if (section == Section::name) {
        if (is_blank(line.body)) continue;
        parse_name(line);
        section = Section::init;
        continue;
      }
      std::vector<Token> toks;
      if (!tokenize(line, toks)) continue;
      if (toks.empty()) continue;

      if (section == Section::condition) {
        cond_tokens.insert(cond_tokens.end(), toks.begin(), toks.end());
        continue;
      }
      const bool header = is_kind(toks, 1, Tok::colon);
      if (header && (is_word(toks, 0, "exists") || is_word(toks, 0, "forall"))) {
        if (!saw_init_) error(toks[0].span, "expected init section");
        if (!saw_thread) error(toks[0].span, "expected thread block");
        program_.assertion.quantifier =
            toks[0].text == "exists" ? Quantifier::exists : Quantifier::forall;
        cond_tokens.assign(toks.begin() + 2, toks.end());
        cond_span = toks[1].span;
        saw_condition = true;
        section = Section::condition;
        continue;
      }
      if (header && is_word(toks, 0, "init")) {
        if (saw_init_) error(toks[0].span, "duplicate init section");
        if (saw_thread) error(toks[0].span, "init section must precede threads");
        saw_init_ = true;
        section = Section::init;
        parse_init_assignments(toks, 2);
        continue;
      }
      if (is_word(toks, 0, "thread")) {
        if (!saw_init_) error(toks[0].span, "expected init section");
        parse_thread_header(line, toks);
        saw_thread = true;
        section = Section::threads;
        continue;
      }
      if (section == Section::init && saw_init_) {
        parse_init_assignments(toks, 0);
        continue;
      }
      if (section == Section::threads) {
        parse_instruction(line, toks);
        continue;
      }
      error(toks[0].span, saw_init_ ? "expected thread block" : "expected init section");
    }

    const Line& last = lines_.back();
    if (section == Section::name) {
      error(end_of_line(last), "expected name header");
      return;
    }
    if (!saw_condition) {
      if (!saw_init_) error(end_of_line(last), "expected init section");
      if (!saw_thread) error(end_of_line(last), "expected thread block");
      error(end_of_line(last), "expected exists: or forall: clause");
      return;
    }
    parse_condition(cond_tokens, cond_span);
  }

  static bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
  }

  // The test name is taken verbatim so that names like "SB+fences" work.
  void parse_name(const Line& line) {
    std::size_t start = 0;
    while (start < line.body.size() &&
           std::isspace(static_cast<unsigned char>(line.body[start])))
      ++start;
    const std::string_view body = line.body.substr(start);
    if (body.substr(0, 4) != "name") {
      error(span_at(line, start, 1), "expected name header");
      return;
    }
    std::size_t colon = 4;
    while (colon < body.size() && (body[colon] == ' ' || body[colon] == '\t')) ++colon;
    if (colon >= body.size() || body[colon] != ':') {
      error(span_at(line, start, 4), "expected name header");
      return;
    }
    colon += start;
    std::string_view rest = line.body.substr(colon + 1);
    std::size_t lead = 0;
    while (lead < rest.size() && std::isspace(static_cast<unsigned char>(rest[lead]))) ++lead;
    std::size_t len = rest.size();
    while (len > lead && std::isspace(static_cast<unsigned char>(rest[len - 1]))) --len;
    const std::string_view name = rest.substr(lead, len - lead);
    const SourceSpan span = span_at(line, colon + 1 + lead, name.size());
    if (name.empty()) {
      error(span, "expected test name after 'name:'");
      return;
    }
    if (!std::all_of(name.begin(), name.end(), name_char)) {
      error(span, "test name may only contain letters, digits and _ . + -");
      return;
    }
    program_.name = std::string(name);
  }

  bool check_identifier(const Token& tok, std::string_view what) {
    if (tok.kind != Tok::ident) {
      error(tok.span, "expected " + std::string(what));
      return false;
    }
    if (is_reserved(tok.text)) {
      error(tok.span, "reserved word '" + std::string(tok.text) + "' cannot be used as " +
                          std::string(what));
      return false;
    }
    return true;
  }

  std::optional<Value> number(const Token& tok) {
    if (tok.kind != Tok::number) {
      error(tok.span, "expected number");
      return std::nullopt;
    }
    if (tok.value > 255) {
      error(tok.span, "value out of range 0..255");
      return std::nullopt;
    }
    return static_cast<Value>(tok.value);
  }

  void parse_init_assignments(const std::vector<Token>& toks, std::size_t i) {
    while (i < toks.size()) {
      if (!check_identifier(toks[i], "location")) return;
      if (!is_kind(toks, i + 1, Tok::equals)) {
        error(toks[i].span, "expected '=' after location");
        return;
      }
      if (i + 2 >= toks.size()) {
        error(toks[i + 1].span, "expected number");
        return;
      }
      auto v = number(toks[i + 2]);
      if (!v) return;
      const std::string loc(toks[i].text);
      if (program_.location_index(loc) >= 0) {
        error(toks[i].span, "duplicate init location '" + loc + "'");
      } else {
        program_.locations.push_back(loc);
        program_.initial.push_back(*v);
      }
      i += 3;
    }
  }

  void parse_thread_header(const Line& line, const std::vector<Token>& toks) {
    current_thread_ = -1;
    if (toks.size() < 2 || !check_identifier(toks[1], "thread name")) {
      if (toks.size() < 2) error(end_of_line(line), "expected thread name");
      return;
    }
    if (!is_kind(toks, 2, Tok::colon)) {
      error(toks[1].span, "expected ':' after thread name");
      return;
    }
    if (toks.size() > 3) {
      error(toks[3].span, "unexpected tokens after thread header");
      return;
    }
    const std::string name(toks[1].text);
    if (program_.thread_index(name) >= 0) {
      error(toks[1].span, "duplicate thread name '" + name + "'");
      return;
    }
    program_.threads.push_back(Thread{name, {}, {}});
    current_thread_ = static_cast<int>(program_.threads.size()) - 1;
  }

  int location(const Token& tok) {
    if (!check_identifier(tok, "location")) return -1;
    const int idx = program_.location_index(tok.text);
    if (idx >= 0) return idx;
    program_.locations.emplace_back(tok.text);
    program_.initial.push_back(0);
    return static_cast<int>(program_.locations.size()) - 1;
  }

  int reg(Thread& thread, const Token& tok) {
    if (!check_identifier(tok, "register")) return -1;
    const int idx = thread.register_index(tok.text);
    if (idx >= 0) return idx;
    thread.registers.emplace_back(tok.text);
    return static_cast<int>(thread.registers.size()) - 1;
  }

  std::optional<Operand> operand(Thread& thread, const Token& tok) {
    if (tok.kind == Tok::number) {
      auto v = number(tok);
      if (!v) return std::nullopt;
      return Operand::constant(*v);
    }
    const int r = reg(thread, tok);
    if (r < 0) return std::nullopt;
    return Operand::from_register(r);
  }

  std::optional<MemoryOrder> order(const Token& tok) {
    auto o = tok.kind == Tok::ident ? parse_memory_order(tok.text) : std::nullopt;
    if (!o) error(tok.span, "expected memory order");
    return o;
  }

  void parse_instruction(const Line& line, const std::vector<Token>& toks) {
    if (current_thread_ < 0) return;  // header error already reported
    Thread& thread = program_.threads[current_thread_];
    Instruction ins;
    std::size_t i = 0;
    const Token* dest_tok = nullptr;

    if (is_kind(toks, 1, Tok::equals)) {
      dest_tok = &toks[0];
      i = 2;
    }
    if (i >= toks.size()) {
      error(end_of_line(line), "expected operation");
      return;
    }
    const Token& op_tok = toks[i];
    auto kind = op_tok.kind == Tok::ident ? parse_op_kind(op_tok.text) : std::nullopt;
    if (!kind) {
      error(op_tok.span, "expected operation");
      return;
    }
    ins.kind = *kind;
    ++i;

    if (has_destination(ins.kind) != (dest_tok != nullptr)) {
      error(op_tok.span, dest_tok ? "operation does not produce a value"
                                  : "operation needs a destination register");
      return;
    }

    auto need = [&](std::size_t k, std::string_view what) {
      if (k < toks.size()) return true;
      error(end_of_line(line), "expected " + std::string(what));
      return false;
    };

    if (ins.kind == OpKind::fence) {
      if (!need(i, "memory order")) return;
      auto o = order(toks[i]);
      if (!o) return;
      ins.order = *o;
      ++i;
    } else {
      if (!need(i, "location")) return;
      ins.location = location(toks[i]);
      if (ins.location < 0) return;
      ++i;
      if (has_operand(ins.kind)) {
        if (!need(i, "value")) return;
        auto val = operand(thread, toks[i]);
        if (!val) return;
        ins.operand = *val;
        ++i;
      }
      if (is_cas(ins.kind)) {
        if (!need(i, "expected value")) return;
        auto e = number(toks[i]);
        if (!e) return;
        if (!need(i + 1, "desired value")) return;
        auto d = number(toks[i + 1]);
        if (!d) return;
        ins.expected = *e;
        ins.desired = *d;
        i += 2;
      }
      if (is_atomic(ins.kind)) {
        if (i < toks.size()) {
          auto o = order(toks[i]);
          if (!o) return;
          ins.order = *o;
          ++i;
        }
        if (is_cas(ins.kind)) ins.failure_order = derive_failure_order(ins.order);
        if (is_cas(ins.kind) && i < toks.size()) {
          auto o = order(toks[i]);
          if (!o) return;
          ins.failure_order = *o;
          ++i;
        }
      }
    }
    if (i < toks.size()) {
      error(toks[i].span, "unexpected tokens after instruction");
      return;
    }
    if (dest_tok) {
      ins.dest = reg(thread, *dest_tok);
      if (ins.dest < 0) return;
    }
    thread.code.push_back(ins);
  }

  // --- condition ----------------------------------------------------------

  void parse_condition(const std::vector<Token>& toks, SourceSpan anchor) {
    cond_ = &toks;
    cond_pos_ = 0;
    cond_anchor_ = anchor;
    if (toks.empty()) {
      error(anchor, "expected condition");
      return;
    }
    auto f = parse_disjunction(0);
    if (!f) return;
    if (cond_pos_ < toks.size()) {
      error(toks[cond_pos_].span, "unexpected token in condition");
      return;
    }
    program_.assertion.formula = std::move(*f);
  }

  SourceSpan cond_here() const {
    if (cond_pos_ < cond_->size()) return (*cond_)[cond_pos_].span;
    if (!cond_->empty()) {
      SourceSpan s = cond_->back().span;
      s.column += s.end - s.begin;
      s.begin = s.end;
      return s;
    }
    return cond_anchor_;
  }

  std::optional<Formula> parse_disjunction(int depth) {
    std::vector<Formula> parts;
    auto first = parse_conjunction(depth);
    if (!first) return std::nullopt;
    parts.push_back(std::move(*first));
    while (is_kind(*cond_, cond_pos_, Tok::disj)) {
      ++cond_pos_;
      auto next = parse_conjunction(depth);
      if (!next) return std::nullopt;
      parts.push_back(std::move(*next));
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Formula::any_of(std::move(parts));
  }

  std::optional<Formula> parse_conjunction(int depth) {
    std::vector<Formula> parts;
    auto first = parse_unary(depth);
    if (!first) return std::nullopt;
    parts.push_back(std::move(*first));
    while (is_kind(*cond_, cond_pos_, Tok::conj)) {
      ++cond_pos_;
      auto next = parse_unary(depth);
      if (!next) return std::nullopt;
      parts.push_back(std::move(*next));
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Formula::all_of(std::move(parts));
  }

  std::optional<Formula> parse_unary(int depth) {
    if (depth > 200) {
      error(cond_here(), "condition nested too deeply");
      return std::nullopt;
    }
    const auto& toks = *cond_;
    if (is_kind(toks, cond_pos_, Tok::bang)) {
      ++cond_pos_;
      auto inner = parse_unary(depth + 1);
      if (!inner) return std::nullopt;
      return Formula::negate(std::move(*inner));
    }
    if (is_kind(toks, cond_pos_, Tok::lparen)) {
      ++cond_pos_;
      auto inner = parse_disjunction(depth + 1);
      if (!inner) return std::nullopt;
      if (!is_kind(toks, cond_pos_, Tok::rparen)) {
        error(cond_here(), "expected ')'");
        return std::nullopt;
      }
      ++cond_pos_;
      return inner;
    }
    return parse_atom();
  }

  std::optional<Formula> parse_atom() {
    const auto& toks = *cond_;
    if (!is_kind(toks, cond_pos_, Tok::ident)) {
      error(cond_here(), "expected atom");
      return std::nullopt;
    }
    const Token& first = toks[cond_pos_];
    if (!check_identifier(first, "thread or location name")) return std::nullopt;
    ++cond_pos_;
    std::string thread;
    std::string name(first.text);
    if (is_kind(toks, cond_pos_, Tok::colon)) {
      ++cond_pos_;
      if (!is_kind(toks, cond_pos_, Tok::ident)) {
        error(cond_here(), "expected register");
        return std::nullopt;
      }
      if (!check_identifier(toks[cond_pos_], "register")) return std::nullopt;
      thread = std::move(name);
      name = std::string(toks[cond_pos_].text);
      ++cond_pos_;
    }
    if (!is_kind(toks, cond_pos_, Tok::equals)) {
      error(cond_here(), "expected '='");
      return std::nullopt;
    }
    ++cond_pos_;
    if (cond_pos_ >= toks.size()) {
      error(cond_here(), "expected number");
      return std::nullopt;
    }
    auto v = number(toks[cond_pos_]);
    if (!v) return std::nullopt;
    ++cond_pos_;
    if (thread.empty()) return Formula::loc_eq(std::move(name), *v);
    return Formula::reg_eq(std::move(thread), std::move(name), *v);
  }

  std::string_view text_;
  std::vector<Line> lines_;
  std::vector<ParseError> errors_;
  Program program_;
  bool saw_init_ = false;
  int current_thread_ = -1;

  const std::vector<Token>* cond_ = nullptr;
  std::size_t cond_pos_ = 0;
  SourceSpan cond_anchor_;
};

void print_formula_to(std::ostringstream& os, const Formula& f, bool nested) {
  switch (f.kind) {
    case Formula::Kind::register_equals:
      os << f.thread << ':' << f.name << '=' << int(f.value);
      return;
    case Formula::Kind::location_equals:
      os << f.name << '=' << int(f.value);
      return;
    case Formula::Kind::negation:
      os << '!';
      print_formula_to(os, f.operands.at(0), true);
      return;
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction: {
      const char* op = f.kind == Formula::Kind::conjunction ? " /\\ " : " \\/ ";
      if (nested) os << '(';
      for (std::size_t i = 0; i < f.operands.size(); ++i) {
        if (i) os << op;
        print_formula_to(os, f.operands[i], true);
      }
      if (nested) os << ')';
      return;
    }
  }
}

}  // namespace

ParseResult parse_litmus(std::string_view text) { return Parser(text).run(); }

std::string print_formula(const Formula& formula) {
  std::ostringstream os;
  print_formula_to(os, formula, false);
  return os.str();
}

std::string print_instruction(const Thread& thread, const Program& program,
                              const Instruction& ins) {
  auto reg_name = [&](int r) {
    return r >= 0 && static_cast<std::size_t>(r) < thread.registers.size() ? thread.registers[r]
                                                                           : std::string("?");
  };
  std::ostringstream os;
  if (has_destination(ins.kind)) os << reg_name(ins.dest) << " = ";
  os << to_string(ins.kind);
  if (ins.kind == OpKind::fence) {
    os << ' ' << to_string(ins.order);
    return os.str();
  }
  os << ' '
     << (ins.location >= 0 && static_cast<std::size_t>(ins.location) < program.locations.size()
             ? program.locations[ins.location]
             : std::string("?"));
  if (has_operand(ins.kind)) {
    os << ' ';
    if (ins.operand.is_register) {
      os << reg_name(ins.operand.reg);
    } else {
      os << int(ins.operand.literal);
    }
  }
  if (is_cas(ins.kind)) os << ' ' << int(ins.expected) << ' ' << int(ins.desired);
  if (is_atomic(ins.kind)) os << ' ' << to_string(ins.order);
  if (is_cas(ins.kind)) os << ' ' << to_string(ins.failure_order);
  return os.str();
}

std::string print_litmus(const Program& program) {
  std::ostringstream os;
  os << "name: " << program.name << '\n';
  os << "init:";
  for (std::size_t l = 0; l < program.locations.size(); ++l) {
    const Value v = l < program.initial.size() ? program.initial[l] : 0;
    os << ' ' << program.locations[l] << '=' << int(v);
  }
  os << '\n';
  for (const auto& thread : program.threads) {
    os << "thread " << thread.name << ":\n";
    for (const auto& ins : thread.code) os << "  " << print_instruction(thread, program, ins) << '\n';
  }
  os << (program.assertion.quantifier == Quantifier::exists ? "exists: " : "forall: ")
     << print_formula(program.assertion.formula) << '\n';
  return os.str();
}

std::string format_parse_error(std::string_view file, const ParseError& error) {
  std::ostringstream os;
  os << file << ':' << error.span.line << ':' << error.span.column << ": " << error.message;
  return os.str();
}

}  // namespace memlit
