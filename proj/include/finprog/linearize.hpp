#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "finprog/text.hpp"

// Table-to-sentence linearization. A raw table is a string matrix whose row 0
// holds column headers and whose column 0 holds row headers.

namespace finprog {

enum class CorpusErrc {
  FileUnreadable,
  SchemaMismatch,
  IndexOutOfRange,
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(CorpusErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  CorpusErrc code() const { return code_; }

 private:
  CorpusErrc code_;
};

/// Templates one table cell into a sentence: "The {row} of {col} is {value}".
/// Row headers that already start with "the" keep their own article, so
/// "The Charlotte at Midtown" stays "The Charlotte at Midtown of Units is
/// 279". Whitespace runs collapse to single spaces.
inline std::string linearize_cell(std::string_view row_header, std::string_view col_header,
                                  std::string_view value) {
  const std::string row = detail::normalize_ws_copy(row_header);
  const std::string lower_row = detail::lower_copy(row);
  std::string sentence;
  if (!(lower_row == "the" || lower_row.rfind("the ", 0) == 0)) {
    sentence = "The ";
  }
  sentence += row;
  sentence += " of ";
  sentence += detail::normalize_ws_copy(col_header);
  sentence += " is ";
  sentence += detail::normalize_ws_copy(value);
  return detail::normalize_ws_copy(sentence);
}

/// Per-cell sentences of one data row, column order. Row 0 is the column
/// header row and cannot be linearized.
inline std::vector<std::string> linearize_row_cells(
    const std::vector<std::vector<std::string>>& table, std::size_t row_index) {
  if (row_index == 0 || row_index >= table.size()) {
    throw CorpusError(CorpusErrc::IndexOutOfRange,
                      "table row index out of range: " + std::to_string(row_index));
  }
  const auto& header = table[0];
  const auto& row = table[row_index];
  std::vector<std::string> cells;
  const std::size_t columns = std::min(header.size(), row.size());
  for (std::size_t c = 1; c < columns; ++c) {
    cells.push_back(linearize_cell(row.empty() ? "" : row[0], header[c], row[c]));
  }
  return cells;
}

/// One evidence sentence for a whole row: cell sentences joined with " ; "
/// and terminated with " .". The punctuation is a convention of this
/// implementation, hence the parameters.
inline std::string linearize_row(const std::vector<std::vector<std::string>>& table,
                                 std::size_t row_index, std::string_view separator = " ; ",
                                 std::string_view terminator = " .") {
  const std::vector<std::string> cells = linearize_row_cells(table, row_index);
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += separator;
    out += cells[i];
  }
  if (!cells.empty()) out += terminator;
  return out;
}

}  // namespace finprog
