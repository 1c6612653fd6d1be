#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finprog/corpus.hpp"
#include "finprog/keyphrase.hpp"
#include "finprog/rng.hpp"
#include "finprog/text.hpp"

// Construction of the three pretraining corpora from ingested examples:
//   * integrity ranking   — pseudo evidence sets ordered by how much gold
//     evidence they retain, paired for pairwise ranking;
//   * operator prediction — one instance per variable sub-program, operands
//     grounded as token spans in the gold evidence;
//   * keyphrase masking   — one masked occurrence per qualifying keyphrase
//     over the question plus cell-based gold evidence.
// Every generator is a pure function of (example, parameters, seed).

namespace finprog {

inline constexpr std::string_view kMaskToken = "[MASK]";

enum class PretrainErrc {
  NoIrrelevantEvidence,
};

class PretrainError : public std::runtime_error {
 public:
  PretrainError(PretrainErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  PretrainErrc code() const { return code_; }

 private:
  PretrainErrc code_;
};

// --------------------------------------------------------------------------
// Integrity ranking

struct IntegritySet {
  std::size_t level = 0;  // 0 keeps the full gold set; each level swaps one more out
  std::vector<EvidenceItem> evidence;
  std::size_t gold_count = 0;
};

struct RankPair {
  IntegritySet higher;  // smaller level, more gold
  IntegritySet lower;
  std::string question;
};

namespace detail {

struct VirPools {
  std::vector<EvidenceItem> gold;
  std::vector<EvidenceItem> distractors;
};

inline VirPools split_candidates(const HybridExample& ex) {
  VirPools pools;
  for (const EvidenceItem& item : ex.candidates) {
    (item.is_gold ? pools.gold : pools.distractors).push_back(item);
  }
  return pools;
}

inline std::vector<IntegritySet> vir_chain(const HybridExample& ex, std::size_t k,
                                           std::mt19937_64& rng,
                                           std::vector<EvidenceItem>& pool) {
  VirPools pools = split_candidates(ex);
  pool = std::move(pools.distractors);
  if (pool.empty()) {
    throw PretrainError(PretrainErrc::NoIrrelevantEvidence,
                        ex.id + ": every candidate is gold; nothing to swap in");
  }
  const std::size_t effective_k = std::min({k, pools.gold.size(), pool.size()});

  std::vector<IntegritySet> sets;
  sets.push_back({0, pools.gold, pools.gold.size()});
  std::vector<EvidenceItem> current = pools.gold;
  for (std::size_t level = 1; level <= effective_k; ++level) {
    std::vector<std::size_t> gold_positions;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (current[i].is_gold) gold_positions.push_back(i);
    }
    const std::size_t victim = gold_positions[uniform_index(rng, gold_positions.size())];
    const std::size_t pick = uniform_index(rng, pool.size());
    current[victim] = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    sets.push_back({level, current, pools.gold.size() - level});
  }
  return sets;
}

}  // namespace detail

/// Builds the level-0..k' pseudo evidence sets for one example: level 0 is
/// the gold set, and each next level replaces one remaining gold item with an
/// irrelevant candidate drawn without replacement. k' = min(k, |gold|,
/// |candidates \ gold|).
inline std::vector<IntegritySet> gen_vir_sets(const HybridExample& ex, std::size_t k,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EvidenceItem> unused_pool;
  return detail::vir_chain(ex, k, rng, unused_pool);
}

/// Retriever variant: the same chain with one extra irrelevant item appended
/// to every set, so each set carries |gold| + 1 sentences. Needs k' + 1
/// distractors.
inline std::vector<IntegritySet> gen_noisy_vir_sets(const HybridExample& ex, std::size_t k,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EvidenceItem> pool;
  std::vector<IntegritySet> sets = detail::vir_chain(ex, k, rng, pool);
  if (pool.empty()) {
    throw PretrainError(PretrainErrc::NoIrrelevantEvidence,
                        ex.id + ": noisy ranking needs one distractor beyond the swap chain");
  }
  const EvidenceItem extra = pool[uniform_index(rng, pool.size())];
  for (IntegritySet& set : sets) set.evidence.push_back(extra);
  return sets;
}

/// All ordered pairs (higher integrity, lower integrity): levels u < v, which
/// is (k'+1) * k' / 2 pairs for k'+1 sets.
inline std::vector<RankPair> gen_vir_pairs(const std::vector<IntegritySet>& sets,
                                           const std::string& question) {
  std::vector<RankPair> pairs;
  for (std::size_t u = 0; u < sets.size(); ++u) {
    for (std::size_t v = u + 1; v < sets.size(); ++v) {
      pairs.push_back({sets[u], sets[v], question});
    }
  }
  return pairs;
}

// --------------------------------------------------------------------------
// Operator prediction

struct OperandSpan {
  std::size_t evidence_index = 0;  // into the example's gold evidence list
  std::size_t token_begin = 0;     // whitespace-token offsets, end exclusive
  std::size_t token_end = 0;

  bool operator==(const OperandSpan&) const = default;
};

struct OperatorExample {
  std::string question;
  std::vector<EvidenceItem> evidence;  // gold evidence, candidate order
  std::vector<OperandSpan> spans;      // one per operand, program order
  Op label = Op::Add;
};

struct VopResult {
  std::vector<OperatorExample> examples;
  std::vector<std::string> skipped;     // per-step diagnostics
  std::size_t ambiguous_operands = 0;   // operands with several value matches
};

namespace detail {

struct TokenizedEvidence {
  std::vector<std::vector<std::string>> tokens;           // surfaces per sentence
  std::vector<std::vector<std::optional<double>>> values; // parsed value per token
};

inline TokenizedEvidence tokenize_gold(const std::vector<EvidenceItem>& gold) {
  TokenizedEvidence out;
  for (const EvidenceItem& item : gold) {
    std::vector<std::string> surfaces;
    std::vector<std::optional<double>> values;
    for (const TextToken& tok : whitespace_tokenize(item.sentence)) {
      std::optional<double> value;
      if (auto parsed = try_parse_numeric(tok.surface)) {
        value = parsed->value;
      } else if (auto stripped = try_parse_numeric(strip_numeric_edges(tok.surface))) {
        value = stripped->value;
      }
      surfaces.push_back(tok.surface);
      values.push_back(value);
    }
    out.tokens.push_back(std::move(surfaces));
    out.values.push_back(std::move(values));
  }
  return out;
}

// First token whose parsed value equals the operand value, scanning evidence
// in candidate order; also reports how many tokens matched in total.
inline std::optional<OperandSpan> locate_value(const TokenizedEvidence& evidence, double value,
                                               std::size_t& match_count) {
  std::optional<OperandSpan> first;
  match_count = 0;
  for (std::size_t e = 0; e < evidence.values.size(); ++e) {
    for (std::size_t t = 0; t < evidence.values[e].size(); ++t) {
      if (evidence.values[e][t] && *evidence.values[e][t] == value) {
        ++match_count;
        if (!first) first = OperandSpan{e, t, t + 1};
      }
    }
  }
  return first;
}

}  // namespace detail

/// One training instance per variable sub-program: all-literal steps use
/// their literals as operands; table steps use every numeric cell of the
/// referenced row. Operands are grounded at their first value-matching token
/// in the gold evidence; steps with an ungroundable operand are skipped and
/// reported, never fatal.
inline VopResult gen_vop(const HybridExample& ex) {
  VopResult result;
  const std::vector<EvidenceItem> gold = ex.gold();
  const detail::TokenizedEvidence tokenized = detail::tokenize_gold(gold);

  for (std::size_t s = 0; s < ex.program.steps.size(); ++s) {
    const Step& step = ex.program.steps[s];
    std::vector<double> operand_values;
    if (is_table_op(step.op)) {
      const auto* ref = std::get_if<RowRef>(&step.operands.front());
      const TableRow* row = ref != nullptr ? ex.ctx.find_row(ref->name) : nullptr;
      if (row == nullptr) {
        result.skipped.push_back(ex.id + " step " + std::to_string(s) +
                                 ": table row not found");
        continue;
      }
      operand_values = ex.ctx.numeric_cells(*row);
      if (operand_values.size() < 2) {
        result.skipped.push_back(ex.id + " step " + std::to_string(s) +
                                 ": row has fewer than 2 numeric cells");
        continue;
      }
    } else {
      const bool all_literals =
          std::all_of(step.operands.begin(), step.operands.end(), [](const Operand& o) {
            return std::holds_alternative<NumberLiteral>(o);
          });
      if (!all_literals) continue;  // not a variable sub-program
      for (const Operand& operand : step.operands) {
        operand_values.push_back(std::get<NumberLiteral>(operand).value);
      }
    }

    OperatorExample example{ex.question, gold, {}, step.op};
    bool grounded = true;
    for (double value : operand_values) {
      std::size_t matches = 0;
      const auto span = detail::locate_value(tokenized, value, matches);
      if (!span) {
        result.skipped.push_back(ex.id + " step " + std::to_string(s) +
                                 ": operand value not present in gold evidence");
        grounded = false;
        break;
      }
      if (matches > 1) ++result.ambiguous_operands;
      example.spans.push_back(*span);
    }
    if (grounded) result.examples.push_back(std::move(example));
  }
  return result;
}

// --------------------------------------------------------------------------
// Keyphrase masking

struct MaskedExample {
  std::string question;
  std::vector<std::string> tokens;  // question then evidence; [MASK] sentinels in place
  std::vector<std::pair<std::size_t, std::string>> targets;  // (position, original token)
};

/// Cell-based rendering of the gold evidence: text sentences verbatim, table
/// rows as one sentence per cell.
inline std::vector<std::string> cell_based_gold_evidence(const HybridExample& ex) {
  std::vector<std::string> out;
  for (const EvidenceItem& item : ex.gold()) {
    if (item.source == EvidenceItem::Source::TableRow && item.row_index > 0) {
      for (std::string& cell : linearize_row_cells(ex.table, static_cast<std::size_t>(
                                                                 item.row_index))) {
        out.push_back(std::move(cell));
      }
    } else {
      out.push_back(item.sentence);
    }
  }
  return out;
}

/// Masks exactly one uniformly chosen occurrence of every qualifying
/// keyphrase (graph-ranked phrases plus table headers, frequency >= 2) in the
/// question-plus-cell-evidence token sequence. Returns at most one instance
/// per example, aggregating all masks.
inline std::vector<MaskedExample> gen_vkm(const HybridExample& ex, std::uint64_t seed,
                                          const KeyphraseOptions& opts = {}) {
  const std::vector<std::string> evidence = cell_based_gold_evidence(ex);
  std::vector<Keyphrase> phrases = extract_textrank_keyphrases(ex.question, evidence, opts);
  for (const Keyphrase& header : extract_header_keyphrases(ex.table)) {
    const std::string key = detail::phrase_key(header.tokens);
    const bool seen = std::any_of(phrases.begin(), phrases.end(), [&](const Keyphrase& p) {
      return detail::phrase_key(p.tokens) == key;
    });
    if (!seen) phrases.push_back(header);
  }
  if (phrases.empty()) return {};

  std::vector<std::string> tokens;
  for (const TextToken& tok : whitespace_tokenize(ex.question)) tokens.push_back(tok.surface);
  for (const std::string& sentence : evidence) {
    for (const TextToken& tok : whitespace_tokenize(sentence)) tokens.push_back(tok.surface);
  }
  std::vector<std::string> keys(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) keys[i] = word_key(tokens[i]);

  std::mt19937_64 rng(seed);
  std::vector<bool> masked(tokens.size(), false);
  std::vector<std::pair<std::size_t, std::string>> targets;
  for (const Keyphrase& phrase : phrases) {
    const std::size_t len = phrase.tokens.size();
    if (len == 0 || len > tokens.size()) continue;
    std::vector<std::size_t> occurrences;
    for (std::size_t p = 0; p + len <= tokens.size(); ++p) {
      bool match = true;
      for (std::size_t i = 0; i < len && match; ++i) {
        match = !masked[p + i] && !keys[p + i].empty() && keys[p + i] == phrase.tokens[i];
      }
      if (match) occurrences.push_back(p);
    }
    if (occurrences.empty()) continue;
    const std::size_t start = occurrences[uniform_index(rng, occurrences.size())];
    for (std::size_t i = 0; i < len; ++i) {
      masked[start + i] = true;
      targets.emplace_back(start + i, tokens[start + i]);
    }
  }
  if (targets.empty()) return {};

  std::sort(targets.begin(), targets.end());
  MaskedExample example{ex.question, tokens, std::move(targets)};
  for (const auto& [position, _] : example.targets) {
    example.tokens[position] = std::string(kMaskToken);
  }
  return {std::move(example)};
}

}  // namespace finprog
