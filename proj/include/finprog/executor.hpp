#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finprog/dsl.hpp"
#include "finprog/strings.hpp"

// Program evaluation against an optional table context. Percent literals are
// kept at face value (14.1% evaluates as 14.1); scale equivalence is a
// comparison-time concern, never an evaluation-time one.

namespace finprog {

enum class ExecErrc {
  NotANumber,
  DivisionByZero,
  RowNotFound,
  EmptyNumericRow,
  YesNoUsedAsNumber,
  MissingTable,
  DuplicateRowHeader,
};

class ExecError : public std::runtime_error {
 public:
  ExecError(ExecErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExecErrc code() const { return code_; }

 private:
  ExecErrc code_;
};

// --------------------------------------------------------------------------
// Numeric tokens

struct NumericToken {
  std::string raw;
  double value = 0.0;
  bool percent = false;
};

/// Parses report-style numbers: "$1,760" -> 1760, "14.1%" -> 14.1 with the
/// percent flag set, accounting negatives "(170.1)" -> -170.1.
inline NumericToken parse_numeric(std::string_view raw) {
  NumericToken token{std::string(raw), 0.0, false};
  std::string_view v = detail::trim_view(raw);
  if (v.empty()) {
    throw ExecError(ExecErrc::NotANumber, "empty numeric token");
  }
  bool negative = false;
  if (v.size() >= 2 && v.front() == '(' && v.back() == ')') {
    negative = true;
    v = detail::trim_view(v.substr(1, v.size() - 2));
  }
  if (!v.empty() && v.front() == '-') {
    negative = !negative;
    v.remove_prefix(1);
    v = detail::trim_view(v);
  }
  if (!v.empty() && v.front() == '$') {
    v = detail::trim_view(v.substr(1));
  }
  if (!v.empty() && v.back() == '%') {
    token.percent = true;
    v = detail::trim_view(v.substr(0, v.size() - 1));
  }
  std::string digits;
  digits.reserve(v.size());
  for (char c : v) {
    if (c == ',') continue;  // thousands separator
    digits.push_back(c);
  }
  if (digits.empty()) {
    throw ExecError(ExecErrc::NotANumber, "not a number: \"" + std::string(raw) + "\"");
  }
  double value = 0.0;
  const char* begin = digits.data();
  const char* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ExecError(ExecErrc::NotANumber, "not a number: \"" + std::string(raw) + "\"");
  }
  token.value = negative ? -value : value;
  return token;
}

inline std::optional<NumericToken> try_parse_numeric(std::string_view raw) {
  try {
    return parse_numeric(raw);
  } catch (const ExecError&) {
    return std::nullopt;
  }
}

// --------------------------------------------------------------------------
// Table context

struct TableRow {
  std::string header;
  std::vector<std::string> cells;  // data cells, column order; parsed on demand
};

class TableContext {
 public:
  TableContext() = default;

  /// Builds a context from a raw matrix whose row 0 holds column headers and
  /// whose column 0 holds row headers. Duplicate row headers (after
  /// whitespace normalization) are rejected.
  static TableContext from_matrix(const std::vector<std::vector<std::string>>& matrix) {
    TableContext ctx;
    if (matrix.empty()) return ctx;
    for (std::size_t c = 1; c < matrix[0].size(); ++c) {
      ctx.column_headers_.push_back(matrix[0][c]);
    }
    for (std::size_t r = 1; r < matrix.size(); ++r) {
      if (matrix[r].empty()) continue;
      TableRow row;
      row.header = matrix[r][0];
      row.cells.assign(matrix[r].begin() + 1, matrix[r].end());
      ctx.add_row(std::move(row));
    }
    return ctx;
  }

  void add_row(TableRow row) {
    const std::string key = detail::normalize_ws_copy(row.header);
    for (const TableRow& existing : rows_) {
      if (detail::normalize_ws_copy(existing.header) == key) {
        throw ExecError(ExecErrc::DuplicateRowHeader,
                        "duplicate row header \"" + key + "\"");
      }
    }
    rows_.push_back(std::move(row));
  }

  const std::vector<TableRow>& rows() const { return rows_; }
  const std::vector<std::string>& column_headers() const { return column_headers_; }

  /// Looks a row up by whitespace-normalized header; falls back to a
  /// case-insensitive scan so program row names survive casing drift.
  const TableRow* find_row(std::string_view name) const {
    const std::string key = detail::normalize_ws_copy(name);
    for (const TableRow& row : rows_) {
      if (detail::normalize_ws_copy(row.header) == key) return &row;
    }
    const std::string lower_key = detail::lower_copy(key);
    for (const TableRow& row : rows_) {
      if (detail::lower_copy(detail::normalize_ws_copy(row.header)) == lower_key) return &row;
    }
    return nullptr;
  }

  std::vector<double> numeric_cells(const TableRow& row) const {
    std::vector<double> values;
    for (const std::string& cell : row.cells) {
      if (auto token = try_parse_numeric(cell)) values.push_back(token->value);
    }
    return values;
  }

 private:
  std::vector<std::string> column_headers_;
  std::vector<TableRow> rows_;
};

// --------------------------------------------------------------------------
// Execution

struct ExecValue {
  std::variant<double, bool> value;

  bool is_number() const { return std::holds_alternative<double>(value); }
  double number() const { return std::get<double>(value); }
  bool yes_no() const { return std::get<bool>(value); }
  bool operator==(const ExecValue&) const = default;
};

namespace detail {

inline double operand_value(const Operand& operand, const std::vector<ExecValue>& results) {
  return std::visit(
      [&](const auto& o) -> double {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NumberLiteral>) {
          return o.value;
        } else if constexpr (std::is_same_v<T, ConstantRef>) {
          return o.value;
        } else if constexpr (std::is_same_v<T, StepRef>) {
          if (o.index >= results.size()) {
            throw DslError(DslErrc::UnresolvedStepRef, "#" + std::to_string(o.index), 0,
                           "step reference out of range");
          }
          const ExecValue& prior = results[o.index];
          if (!prior.is_number()) {
            throw ExecError(ExecErrc::YesNoUsedAsNumber,
                            "step #" + std::to_string(o.index) +
                                " produced yes/no; it cannot feed arithmetic");
          }
          return prior.number();
        } else {
          throw ExecError(ExecErrc::MissingTable,
                          "row reference \"" + o.name + "\" outside a table operator");
        }
      },
      operand);
}

}  // namespace detail

/// Evaluates steps in order and returns the final step's value. A table
/// context is required whenever a row reference occurs.
inline ExecValue eval_program(const Program& p, const TableContext* ctx = nullptr) {
  validate_program(p);
  std::vector<ExecValue> results;
  results.reserve(p.steps.size());
  for (const Step& step : p.steps) {
    if (is_table_op(step.op)) {
      const auto* ref = std::get_if<RowRef>(&step.operands.front());
      if (ref == nullptr) {
        throw ExecError(ExecErrc::RowNotFound, "table operator without a row reference");
      }
      if (ctx == nullptr) {
        throw ExecError(ExecErrc::MissingTable,
                        "program references row \"" + ref->name + "\" but no table was given");
      }
      const TableRow* row = ctx->find_row(ref->name);
      if (row == nullptr) {
        throw ExecError(ExecErrc::RowNotFound, "row not found: \"" + ref->name + "\"");
      }
      const std::vector<double> cells = ctx->numeric_cells(*row);
      if (cells.empty()) {
        throw ExecError(ExecErrc::EmptyNumericRow,
                        "row \"" + ref->name + "\" has no numeric cells");
      }
      double out = 0.0;
      switch (step.op) {
        case Op::TableSum:
          for (double v : cells) out += v;
          break;
        case Op::TableAverage: {
          for (double v : cells) out += v;
          out /= static_cast<double>(cells.size());
          break;
        }
        case Op::TableMax:
          out = *std::max_element(cells.begin(), cells.end());
          break;
        case Op::TableMin:
          out = *std::min_element(cells.begin(), cells.end());
          break;
        default:
          break;
      }
      results.push_back(ExecValue{out});
      continue;
    }
    const double a = detail::operand_value(step.operands[0], results);
    const double b = detail::operand_value(step.operands[1], results);
    switch (step.op) {
      case Op::Add: results.push_back(ExecValue{a + b}); break;
      case Op::Subtract: results.push_back(ExecValue{a - b}); break;
      case Op::Multiply: results.push_back(ExecValue{a * b}); break;
      case Op::Divide:
        if (b == 0.0) {
          throw ExecError(ExecErrc::DivisionByZero, "division by zero");
        }
        results.push_back(ExecValue{a / b});
        break;
      case Op::Exp: results.push_back(ExecValue{std::pow(a, b)}); break;
      case Op::Greater: results.push_back(ExecValue{a > b}); break;
      default: break;
    }
  }
  return results.back();
}

}  // namespace finprog
