#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Arithmetic program DSL for report-style numerical QA: ten operators,
// numeric/constant/step-reference/row-reference operands, and a flattened
// step-list form where `#n` names the result of step n.

namespace finprog {

enum class Op {
  Add,
  Subtract,
  Multiply,
  Divide,
  Exp,
  Greater,
  TableSum,
  TableAverage,
  TableMax,
  TableMin,
};

inline constexpr std::array<Op, 10> kAllOps = {
    Op::Add,      Op::Subtract,     Op::Multiply, Op::Divide,   Op::Exp,
    Op::Greater,  Op::TableSum,     Op::TableAverage, Op::TableMax, Op::TableMin,
};

constexpr std::string_view op_name(Op op) {
  switch (op) {
    case Op::Add: return "add";
    case Op::Subtract: return "subtract";
    case Op::Multiply: return "multiply";
    case Op::Divide: return "divide";
    case Op::Exp: return "exp";
    case Op::Greater: return "greater";
    case Op::TableSum: return "table_sum";
    case Op::TableAverage: return "table_average";
    case Op::TableMax: return "table_max";
    case Op::TableMin: return "table_min";
  }
  return "?";
}

constexpr bool is_table_op(Op op) {
  return op == Op::TableSum || op == Op::TableAverage || op == Op::TableMax ||
         op == Op::TableMin;
}

// Table operators take a single row reference; everything else is binary.
constexpr std::size_t op_arity(Op op) { return is_table_op(op) ? 1 : 2; }

inline std::optional<Op> op_from_name(std::string_view name) {
  for (Op op : kAllOps) {
    if (op_name(op) == name) return op;
  }
  return std::nullopt;
}

// --------------------------------------------------------------------------
// Operands, steps, programs

struct NumberLiteral {
  double value = 0.0;
  bool percent = false;
  std::string raw;  // original token; render reproduces it verbatim
  bool operator==(const NumberLiteral&) const = default;
};

struct ConstantRef {
  std::string token;
  double value = 0.0;
  bool operator==(const ConstantRef&) const = default;
};

struct StepRef {
  std::size_t index = 0;
  bool operator==(const StepRef&) const = default;
};

struct RowRef {
  std::string name;
  bool operator==(const RowRef&) const = default;
};

using Operand = std::variant<NumberLiteral, ConstantRef, StepRef, RowRef>;

struct Step {
  Op op = Op::Add;
  std::vector<Operand> operands;
  bool operator==(const Step&) const = default;
};

struct Program {
  std::vector<Step> steps;  // flattened form; the nested AST is a derived view
  bool operator==(const Program&) const = default;
};

// --------------------------------------------------------------------------
// Errors

enum class DslErrc {
  UnknownOperator,
  ArityMismatch,
  UnresolvedStepRef,
  MalformedToken,
  NestedFormUnavailable,
};

class DslError : public std::runtime_error {
 public:
  DslError(DslErrc code, std::string token, std::size_t offset, const std::string& what)
      : std::runtime_error(what), code_(code), token_(std::move(token)), offset_(offset) {}

  DslErrc code() const { return code_; }
  const std::string& token() const { return token_; }
  std::size_t offset() const { return offset_; }

 private:
  DslErrc code_;
  std::string token_;
  std::size_t offset_;
};

// --------------------------------------------------------------------------
// Parsing

// Constant tokens follow the `const_<n>` convention; `const_m1` is -1.
inline const std::map<std::string, double>& default_constants() {
  static const std::map<std::string, double> kConstants = {
      {"const_1", 1.0},          {"const_2", 2.0},
      {"const_10", 10.0},        {"const_100", 100.0},
      {"const_1000", 1000.0},    {"const_1000000", 1e6},
      {"const_1000000000", 1e9}, {"const_m1", -1.0},
  };
  return kConstants;
}

struct ParseOptions {
  std::map<std::string, double> constants = default_constants();
  // Dataset files spell table steps as `table_op(row, none)`; the trailing
  // `none` carries no meaning and is dropped when this is set.
  bool allow_table_none_operand = true;
};

namespace detail {

struct AstNode {
  bool is_call = false;
  Op op = Op::Add;
  std::string token;  // raw token text, or operator name for calls
  std::size_t offset = 0;
  std::vector<AstNode> args;
};

struct Scanner {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
};

[[noreturn]] inline void fail(DslErrc code, std::string token, std::size_t offset,
                              const std::string& msg) {
  throw DslError(code, std::move(token), offset,
                 msg + " (token \"" + token + "\" at offset " + std::to_string(offset) + ")");
}

inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Raw token: everything up to the next ',' or ')' at the current nesting
// depth. Balanced parentheses inside the token are allowed so that row names
// like "shares outstanding (basic)" and literals like "(7)" survive.
inline AstNode scan_raw_token(Scanner& s) {
  s.skip_ws();
  const std::size_t start = s.pos;
  int depth = 0;
  while (!s.done()) {
    const char c = s.peek();
    if (depth == 0 && (c == ',' || c == ')')) break;
    if (c == '(') ++depth;
    if (c == ')') --depth;
    ++s.pos;
  }
  if (depth != 0) {
    fail(DslErrc::MalformedToken, std::string(s.text.substr(start, s.pos - start)), start,
         "unbalanced parentheses in token");
  }
  std::string token(s.text.substr(start, s.pos - start));
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.pop_back();
  if (token.empty()) {
    fail(DslErrc::MalformedToken, "", start, "empty token");
  }
  return AstNode{false, Op::Add, std::move(token), start, {}};
}

// An argument is a nested call only when it starts with a known operator name
// directly followed by '('. Anything else is a raw token.
inline AstNode parse_expr(Scanner& s, bool require_call);

inline AstNode parse_call(Scanner& s, Op op, std::string name, std::size_t start) {
  ++s.pos;  // consume '('
  AstNode node{true, op, std::move(name), start, {}};
  s.skip_ws();
  if (s.peek() == ')') {
    fail(DslErrc::ArityMismatch, node.token, start, "operator call has no operands");
  }
  while (true) {
    node.args.push_back(parse_expr(s, false));
    s.skip_ws();
    if (s.peek() == ',') {
      ++s.pos;
      continue;
    }
    if (s.peek() == ')') {
      ++s.pos;
      return node;
    }
    fail(DslErrc::MalformedToken, std::string(1, s.peek()), s.pos,
         "expected ',' or ')' in operator call");
  }
}

inline AstNode parse_expr(Scanner& s, bool require_call) {
  s.skip_ws();
  const std::size_t start = s.pos;
  std::size_t p = s.pos;
  while (p < s.text.size() && is_ident_char(s.text[p])) ++p;
  std::size_t q = p;
  while (q < s.text.size() && std::isspace(static_cast<unsigned char>(s.text[q]))) ++q;
  const bool call_shaped = p > s.pos && q < s.text.size() && s.text[q] == '(';
  if (call_shaped) {
    std::string name(s.text.substr(start, p - start));
    if (auto op = op_from_name(name)) {
      s.pos = q;
      return parse_call(s, *op, std::move(name), start);
    }
    if (require_call) {
      fail(DslErrc::UnknownOperator, name, start, "unknown operator");
    }
  }
  if (require_call) {
    AstNode tok = scan_raw_token(s);
    fail(DslErrc::MalformedToken, tok.token, tok.offset, "expected an operator call");
  }
  return scan_raw_token(s);
}

// Program-literal numbers: [-] [$] digits [. digits] [%]. Face value is kept
// for percent tokens; the flag records the '%'.
inline std::optional<NumberLiteral> classify_number(const std::string& token) {
  std::string_view v = token;
  bool negative = false;
  bool percent = false;
  if (!v.empty() && v.front() == '-') {
    negative = true;
    v.remove_prefix(1);
  }
  if (!v.empty() && v.front() == '$') v.remove_prefix(1);
  if (!v.empty() && v.back() == '%') {
    percent = true;
    v.remove_suffix(1);
  }
  if (v.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return NumberLiteral{negative ? -value : value, percent, token};
}

inline Operand classify_operand(const AstNode& tok, Op parent, const ParseOptions& opts,
                                std::size_t next_step_index) {
  if (is_table_op(parent)) {
    return RowRef{tok.token};  // table operands are row names, verbatim
  }
  if (tok.token.front() == '#') {
    std::size_t index = 0;
    const char* begin = tok.token.data() + 1;
    const char* end = tok.token.data() + tok.token.size();
    auto [ptr, ec] = std::from_chars(begin, end, index);
    if (ec != std::errc() || ptr != end) {
      fail(DslErrc::MalformedToken, tok.token, tok.offset, "malformed step reference");
    }
    if (index >= next_step_index) {
      fail(DslErrc::UnresolvedStepRef, tok.token, tok.offset,
           "step reference does not resolve to an earlier step");
    }
    return StepRef{index};
  }
  if (auto it = opts.constants.find(tok.token); it != opts.constants.end()) {
    return ConstantRef{tok.token, it->second};
  }
  if (auto num = classify_number(tok.token)) {
    return *num;
  }
  // A call-shaped token that reaches here names a function we do not know.
  const std::size_t paren = tok.token.find('(');
  if (paren != std::string::npos && paren > 0) {
    bool ident = true;
    for (std::size_t i = 0; i < paren; ++i) ident = ident && is_ident_char(tok.token[i]);
    if (ident) {
      fail(DslErrc::UnknownOperator, tok.token.substr(0, paren), tok.offset, "unknown operator");
    }
  }
  fail(DslErrc::MalformedToken, tok.token, tok.offset, "expected a number, constant or #ref");
}

inline std::size_t emit_steps(const AstNode& call, const ParseOptions& opts, Program& out) {
  // Children first, left to right, so inner calls get lower step indices.
  std::vector<std::optional<std::size_t>> child_index(call.args.size());
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (call.args[i].is_call) {
      if (is_table_op(call.op)) {
        fail(DslErrc::MalformedToken, call.args[i].token, call.args[i].offset,
             "table operators take a row name, not a nested call");
      }
      child_index[i] = emit_steps(call.args[i], opts, out);
    }
  }
  const std::size_t own_index = out.steps.size();
  Step step{call.op, {}};
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (child_index[i]) {
      step.operands.push_back(StepRef{*child_index[i]});
    } else {
      step.operands.push_back(classify_operand(call.args[i], call.op, opts, own_index));
    }
  }
  if (is_table_op(call.op) && opts.allow_table_none_operand && step.operands.size() == 2) {
    if (const auto* row = std::get_if<RowRef>(&step.operands.back()); row && row->name == "none") {
      step.operands.pop_back();
    }
  }
  if (step.operands.size() != op_arity(call.op)) {
    fail(DslErrc::ArityMismatch, call.token, call.offset,
         "operator " + std::string(op_name(call.op)) + " expects " +
             std::to_string(op_arity(call.op)) + " operand(s), got " +
             std::to_string(step.operands.size()));
  }
  out.steps.push_back(std::move(step));
  return own_index;
}

}  // namespace detail

/// Parses a program in nested form `f(a, g(b, c))` or flattened form
/// `g(b, c), f(a, #0)`; whitespace around tokens is ignored. The result is
/// always the flattened step list.
inline Program parse_program(std::string_view text, const ParseOptions& opts = {}) {
  detail::Scanner s{text};
  std::vector<detail::AstNode> top;
  s.skip_ws();
  if (s.done()) {
    detail::fail(DslErrc::MalformedToken, "", 0, "empty program");
  }
  while (true) {
    top.push_back(detail::parse_expr(s, true));
    s.skip_ws();
    if (s.done()) break;
    if (s.peek() == ',') {
      ++s.pos;
      continue;
    }
    detail::fail(DslErrc::MalformedToken, std::string(1, s.peek()), s.pos,
                 "expected ',' between steps or end of input");
  }
  Program prog;
  for (const auto& call : top) {
    detail::emit_steps(call, opts, prog);
  }
  return prog;
}

// --------------------------------------------------------------------------
// Rendering

enum class ProgramForm { Flattened, Nested };

namespace detail {

inline std::string format_value(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

inline std::string render_operand(const Operand& operand) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NumberLiteral>) {
          if (!o.raw.empty()) return o.raw;
          return format_value(o.value) + (o.percent ? "%" : "");
        } else if constexpr (std::is_same_v<T, ConstantRef>) {
          return o.token;
        } else if constexpr (std::is_same_v<T, StepRef>) {
          return "#" + std::to_string(o.index);
        } else {
          return o.name;
        }
      },
      operand);
}

inline std::string render_step(const Step& step) {
  std::string out(op_name(step.op));
  out += '(';
  for (std::size_t i = 0; i < step.operands.size(); ++i) {
    if (i > 0) out += ", ";
    out += render_operand(step.operands[i]);
  }
  out += ')';
  return out;
}

inline std::vector<std::size_t> reference_counts(const Program& p) {
  std::vector<std::size_t> counts(p.steps.size(), 0);
  for (const Step& step : p.steps) {
    for (const Operand& operand : step.operands) {
      if (const auto* ref = std::get_if<StepRef>(&operand)) {
        if (ref->index < counts.size()) ++counts[ref->index];
      }
    }
  }
  return counts;
}

inline std::string render_nested(const Program& p, std::size_t index) {
  const Step& step = p.steps[index];
  std::string out(op_name(step.op));
  out += '(';
  for (std::size_t i = 0; i < step.operands.size(); ++i) {
    if (i > 0) out += ", ";
    if (const auto* ref = std::get_if<StepRef>(&step.operands[i])) {
      out += render_nested(p, ref->index);
    } else {
      out += render_operand(step.operands[i]);
    }
  }
  out += ')';
  return out;
}

// Post-order positions the steps would get when the nested rendering is
// parsed back. Rendering is refused unless that order is the identity, which
// keeps the render/parse round trip structural.
inline void nested_emission_order(const Program& p, std::size_t index, std::size_t& counter,
                                  std::vector<std::size_t>& order) {
  for (const Operand& operand : p.steps[index].operands) {
    if (const auto* ref = std::get_if<StepRef>(&operand)) {
      nested_emission_order(p, ref->index, counter, order);
    }
  }
  order[index] = counter++;
}

}  // namespace detail

/// Renders a program so that parse_program(render_program(p)) reproduces p.
/// The nested form exists only when every intermediate step result is used
/// exactly once; otherwise NestedFormUnavailable is raised.
inline std::string render_program(const Program& p, ProgramForm form = ProgramForm::Flattened) {
  if (p.steps.empty()) {
    detail::fail(DslErrc::MalformedToken, "", 0, "cannot render an empty program");
  }
  if (form == ProgramForm::Flattened) {
    std::string out;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      if (i > 0) out += ", ";
      out += detail::render_step(p.steps[i]);
    }
    return out;
  }
  const auto counts = detail::reference_counts(p);
  for (std::size_t i = 0; i + 1 < p.steps.size(); ++i) {
    if (counts[i] != 1) {
      detail::fail(DslErrc::NestedFormUnavailable, "#" + std::to_string(i), 0,
                   "step result used " + std::to_string(counts[i]) +
                       " times; nested form needs exactly one use");
    }
  }
  std::vector<std::size_t> order(p.steps.size(), 0);
  std::size_t counter = 0;
  detail::nested_emission_order(p, p.steps.size() - 1, counter, order);
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (order[i] != i) {
      detail::fail(DslErrc::NestedFormUnavailable, "#" + std::to_string(i), 0,
                   "nested form would renumber the steps");
    }
  }
  return detail::render_nested(p, p.steps.size() - 1);
}

// --------------------------------------------------------------------------
// Decomposition and validation

/// Steps whose operands are all plain number literals, in program order.
/// These are the single-operator units that can be grounded in evidence text.
inline std::vector<Step> extract_variable_subprograms(const Program& p) {
  std::vector<Step> out;
  for (const Step& step : p.steps) {
    const bool all_literals =
        !step.operands.empty() &&
        std::all_of(step.operands.begin(), step.operands.end(), [](const Operand& o) {
          return std::holds_alternative<NumberLiteral>(o);
        });
    if (all_literals) out.push_back(step);
  }
  return out;
}

/// Checks step-reference ordering and operand arity on a program built in
/// code rather than parsed. Throws DslError on violation.
inline void validate_program(const Program& p) {
  if (p.steps.empty()) {
    detail::fail(DslErrc::MalformedToken, "", 0, "program has no steps");
  }
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& step = p.steps[i];
    if (step.operands.size() != op_arity(step.op)) {
      detail::fail(DslErrc::ArityMismatch, std::string(op_name(step.op)), 0,
                   "operand count does not match operator arity");
    }
    for (const Operand& operand : step.operands) {
      if (const auto* ref = std::get_if<StepRef>(&operand)) {
        if (ref->index >= i) {
          detail::fail(DslErrc::UnresolvedStepRef, "#" + std::to_string(ref->index), 0,
                       "step reference must point to an earlier step");
        }
      }
    }
  }
}

/// Conformant programs stay within six steps; longer ones are unusual enough
/// to flag but are not an error.
inline std::optional<std::string> program_size_warning(const Program& p) {
  if (p.steps.size() > 6) {
    return "program has " + std::to_string(p.steps.size()) +
           " steps; more than 6 is unusual for this task";
  }
  return std::nullopt;
}

}  // namespace finprog
