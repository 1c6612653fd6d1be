#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "finprog/dsl.hpp"
#include "finprog/executor.hpp"
#include "finprog/linearize.hpp"
#include "finprog/text.hpp"

// Dataset ingestion for report-QA JSON files: candidate evidence in document
// order (pre-text, table rows, post-text), gold annotations resolved by id,
// and per-example validation with quarantine instead of global failure.

namespace finprog {

// --------------------------------------------------------------------------
// Evidence and examples

struct EvidenceItem {
  enum class Source { Text, TableRow };

  std::string id;        // "text_3" / "table_2"
  std::string sentence;  // table rows carry their linearization
  Source source = Source::Text;
  int row_index = -1;    // raw table row for table-sourced items
  bool is_gold = false;

  bool operator==(const EvidenceItem&) const = default;
};

struct HybridExample {
  std::string id;
  std::string question;
  std::vector<EvidenceItem> candidates;  // document order: pre-text, table rows, post-text
  std::vector<std::size_t> gold_indices; // into candidates, ascending
  Program program;
  ExecValue execution_answer{0.0};
  std::vector<std::vector<std::string>> table;  // raw matrix, row 0 = headers
  TableContext ctx;

  std::vector<EvidenceItem> gold() const {
    std::vector<EvidenceItem> out;
    out.reserve(gold_indices.size());
    for (std::size_t i : gold_indices) out.push_back(candidates[i]);
    return out;
  }
};

struct LoadReject {
  std::string id;
  std::string reason;
};

struct LoadResult {
  std::vector<HybridExample> examples;
  std::vector<LoadReject> rejects;
  std::vector<std::string> warnings;
  std::size_t total_records = 0;
};

struct CorpusStats {
  std::size_t n = 0;
  double mean_operators = 0.0;
  double mean_gold = 0.0;
  std::size_t max_operators = 0;
  std::size_t max_gold = 0;
};

inline CorpusStats corpus_stats(const std::vector<HybridExample>& examples) {
  CorpusStats stats;
  stats.n = examples.size();
  if (examples.empty()) return stats;
  double ops = 0.0;
  double gold = 0.0;
  for (const HybridExample& ex : examples) {
    ops += static_cast<double>(ex.program.steps.size());
    gold += static_cast<double>(ex.gold_indices.size());
    stats.max_operators = std::max(stats.max_operators, ex.program.steps.size());
    stats.max_gold = std::max(stats.max_gold, ex.gold_indices.size());
  }
  stats.mean_operators = ops / static_cast<double>(examples.size());
  stats.mean_gold = gold / static_cast<double>(examples.size());
  return stats;
}

// --------------------------------------------------------------------------
// Ingestion

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw CorpusError(CorpusErrc::SchemaMismatch, std::string("missing string list: ") + field);
  }
  std::vector<std::string> out;
  for (const auto& item : j[field]) {
    if (!item.is_string()) {
      throw CorpusError(CorpusErrc::SchemaMismatch, std::string("non-string entry in ") + field);
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline std::vector<std::vector<std::string>> string_matrix(const nlohmann::json& j,
                                                           const char* field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw CorpusError(CorpusErrc::SchemaMismatch, std::string("missing table matrix: ") + field);
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& row : j[field]) {
    if (!row.is_array()) {
      throw CorpusError(CorpusErrc::SchemaMismatch, std::string("non-array table row in ") + field);
    }
    std::vector<std::string> cells;
    for (const auto& cell : row) {
      cells.push_back(cell.is_string() ? cell.get<std::string>() : cell.dump());
    }
    out.push_back(std::move(cells));
  }
  return out;
}

inline ExecValue parse_answer(const nlohmann::json& j) {
  if (j.is_number()) return ExecValue{j.get<double>()};
  if (j.is_boolean()) return ExecValue{j.get<bool>()};
  if (j.is_string()) {
    const std::string s = lower_copy(trim_view(j.get<std::string>()));
    if (s == "yes") return ExecValue{true};
    if (s == "no") return ExecValue{false};
    return ExecValue{parse_numeric(s).value};
  }
  throw CorpusError(CorpusErrc::SchemaMismatch, "exe_ans is neither a number nor yes/no");
}

// "text_k" counts pre-text then post-text sentences as one sequence;
// "table_k" is the raw table row index (row 0 is the header row).
inline std::optional<std::size_t> resolve_gold_id(const std::string& gold_id,
                                                  std::size_t pre_count, std::size_t text_count,
                                                  std::size_t table_rows) {
  auto parse_index = [](std::string_view v) -> std::optional<std::size_t> {
    std::size_t value = 0;
    if (v.empty()) return std::nullopt;
    for (char c : v) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
  };
  const std::size_t table_candidates = table_rows > 0 ? table_rows - 1 : 0;
  if (gold_id.rfind("text_", 0) == 0) {
    const auto k = parse_index(std::string_view(gold_id).substr(5));
    if (!k || *k >= text_count) return std::nullopt;
    // candidates: [pre 0..pre_count) [table rows] [post ...]
    if (*k < pre_count) return *k;
    return table_candidates + *k;
  }
  if (gold_id.rfind("table_", 0) == 0) {
    const auto k = parse_index(std::string_view(gold_id).substr(6));
    if (!k || *k == 0 || *k > table_candidates) return std::nullopt;
    return pre_count + (*k - 1);
  }
  return std::nullopt;
}

inline bool loose_sentence_match(std::string_view stored, std::string_view ours) {
  auto squash = [](std::string_view v) {
    std::string out;
    for (char c : v) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    return out;
  };
  const std::string a = squash(stored);
  const std::string b = squash(ours);
  if (a.empty() || b.empty()) return a == b;
  return a.find(b) != std::string::npos || b.find(a) != std::string::npos;
}

}  // namespace detail

/// Loads a dataset file: a JSON array of examples with pre_text, post_text,
/// table and qa {question, program, exe_ans, gold_inds}. Malformed examples
/// are quarantined into the rejects list with a per-example diagnostic; only
/// file-level problems throw.
inline LoadResult load_finqa(const std::string& path, const ParseOptions& parse_opts = {}) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError(CorpusErrc::FileUnreadable, "cannot open dataset file: " + path);
  }
  nlohmann::json root = nlohmann::json::parse(in, nullptr, false);
  if (root.is_discarded() || !root.is_array()) {
    throw CorpusError(CorpusErrc::SchemaMismatch, "dataset file is not a JSON array: " + path);
  }

  LoadResult result;
  result.total_records = root.size();
  std::size_t position = 0;
  for (const auto& record : root) {
    ++position;
    std::string id = record.contains("id") && record["id"].is_string()
                         ? record["id"].get<std::string>()
                         : "record_" + std::to_string(position - 1);
    try {
      HybridExample ex;
      ex.id = id;
      const auto pre_text = detail::string_list(record, "pre_text");
      const auto post_text = detail::string_list(record, "post_text");
      ex.table = detail::string_matrix(record, "table");
      if (!record.contains("qa") || !record["qa"].is_object()) {
        throw CorpusError(CorpusErrc::SchemaMismatch, "missing qa object");
      }
      const auto& qa = record["qa"];
      if (!qa.contains("question") || !qa["question"].is_string()) {
        throw CorpusError(CorpusErrc::SchemaMismatch, "missing qa.question");
      }
      ex.question = qa["question"].get<std::string>();
      if (!qa.contains("program") || !qa["program"].is_string()) {
        throw CorpusError(CorpusErrc::SchemaMismatch, "missing qa.program");
      }
      ex.program = parse_program(qa["program"].get<std::string>(), parse_opts);
      if (!qa.contains("exe_ans")) {
        throw CorpusError(CorpusErrc::SchemaMismatch, "missing qa.exe_ans");
      }
      ex.execution_answer = detail::parse_answer(qa["exe_ans"]);

      const std::size_t table_rows = ex.table.size();
      for (std::size_t i = 0; i < pre_text.size(); ++i) {
        ex.candidates.push_back(
            {"text_" + std::to_string(i), pre_text[i], EvidenceItem::Source::Text, -1, false});
      }
      for (std::size_t r = 1; r < table_rows; ++r) {
        ex.candidates.push_back({"table_" + std::to_string(r), linearize_row(ex.table, r),
                                 EvidenceItem::Source::TableRow, static_cast<int>(r), false});
      }
      for (std::size_t i = 0; i < post_text.size(); ++i) {
        ex.candidates.push_back({"text_" + std::to_string(pre_text.size() + i), post_text[i],
                                 EvidenceItem::Source::Text, -1, false});
      }

      if (!qa.contains("gold_inds")) {
        throw CorpusError(CorpusErrc::SchemaMismatch, "missing qa.gold_inds");
      }
      const std::size_t text_count = pre_text.size() + post_text.size();
      auto mark_gold = [&](const std::string& gold_id, const std::string* stored) {
        const auto idx =
            detail::resolve_gold_id(gold_id, pre_text.size(), text_count, table_rows);
        if (!idx) {
          throw CorpusError(CorpusErrc::SchemaMismatch, "gold id does not resolve: " + gold_id);
        }
        if (stored != nullptr &&
            !detail::loose_sentence_match(*stored, ex.candidates[*idx].sentence)) {
          result.warnings.push_back(id + ": gold sentence for " + gold_id +
                                    " differs from the reconstructed candidate");
        }
        if (!ex.candidates[*idx].is_gold) {
          ex.candidates[*idx].is_gold = true;
          ex.gold_indices.push_back(*idx);
        }
      };
      const auto& gold_inds = qa["gold_inds"];
      if (gold_inds.is_object()) {
        for (const auto& [gold_id, stored] : gold_inds.items()) {
          const std::string text = stored.is_string() ? stored.get<std::string>() : std::string();
          mark_gold(gold_id, stored.is_string() ? &text : nullptr);
        }
      } else if (gold_inds.is_array()) {
        for (const auto& entry : gold_inds) {
          if (!entry.is_string()) {
            throw CorpusError(CorpusErrc::SchemaMismatch, "gold_inds entry is not a string");
          }
          mark_gold(entry.get<std::string>(), nullptr);
        }
      } else {
        throw CorpusError(CorpusErrc::SchemaMismatch, "gold_inds is neither object nor array");
      }
      if (ex.gold_indices.empty()) {
        throw CorpusError(CorpusErrc::SchemaMismatch, "example has no gold evidence");
      }
      std::sort(ex.gold_indices.begin(), ex.gold_indices.end());

      ex.ctx = TableContext::from_matrix(ex.table);
      eval_program(ex.program, &ex.ctx);  // must execute cleanly

      if (auto warning = program_size_warning(ex.program)) {
        result.warnings.push_back(id + ": " + *warning);
      }
      result.examples.push_back(std::move(ex));
    } catch (const std::exception& e) {
      result.rejects.push_back({id, e.what()});
    }
  }
  return result;
}

}  // namespace finprog
