#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "finprog/corpus.hpp"
#include "finprog/equivalence.hpp"
#include "finprog/executor.hpp"

// Scoring: execution accuracy (does the predicted program evaluate to the
// gold answer), program accuracy (is it rule-equivalent to the gold program)
// and retriever recall@k. Execution accuracy upper-bounds program accuracy.

namespace finprog {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PredictionRecord {
  std::string example_id;
  std::optional<Program> predicted;  // empty on parse failure; scores 0, never crashes
  Program gold_program;
  ExecValue gold_answer{0.0};
  TableContext table;
};

struct MetricOptions {
  double tol = 1e-4;           // relative, against max(1, |gold|)
  bool percent_equiv = false;  // also accept x*100 / x/100
  CanonicalizeOptions canon;
};

namespace detail {

inline bool numbers_match(double predicted, double gold, double tol) {
  return std::abs(predicted - gold) <= tol * std::max(1.0, std::abs(gold));
}

}  // namespace detail

inline bool answers_match(const ExecValue& predicted, const ExecValue& gold,
                          const MetricOptions& opts = {}) {
  if (predicted.is_number() != gold.is_number()) return false;
  if (!predicted.is_number()) return predicted.yes_no() == gold.yes_no();
  if (detail::numbers_match(predicted.number(), gold.number(), opts.tol)) return true;
  if (opts.percent_equiv) {
    return detail::numbers_match(predicted.number(), gold.number() * 100.0, opts.tol) ||
           detail::numbers_match(predicted.number(), gold.number() / 100.0, opts.tol);
  }
  return false;
}

inline bool execution_match(const PredictionRecord& record, const MetricOptions& opts = {}) {
  if (!record.predicted) return false;
  try {
    return answers_match(eval_program(*record.predicted, &record.table), record.gold_answer,
                         opts);
  } catch (const std::exception&) {
    return false;  // execution errors score zero
  }
}

inline double execution_accuracy(const std::vector<PredictionRecord>& records,
                                 const MetricOptions& opts = {}) {
  if (records.empty()) return 0.0;
  std::size_t correct = 0;
  for (const PredictionRecord& record : records) {
    if (execution_match(record, opts)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

inline double program_accuracy(const std::vector<PredictionRecord>& records,
                               const MetricOptions& opts = {}) {
  if (records.empty()) return 0.0;
  std::size_t correct = 0;
  for (const PredictionRecord& record : records) {
    if (record.predicted && prog_equal(*record.predicted, record.gold_program, opts.canon)) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

/// Gold share inside the k best-scored candidates; ties keep candidate
/// order. Gold membership is by evidence id.
inline double recall_at_k(const std::vector<std::pair<EvidenceItem, double>>& scored,
                          const std::vector<EvidenceItem>& gold, std::size_t k) {
  if (gold.empty()) {
    throw MetricsError("recall@k with an empty gold set");
  }
  if (k == 0) {
    throw MetricsError("recall@k needs k >= 1");
  }
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].second > scored[b].second;
  });
  std::size_t hits = 0;
  const std::size_t top = std::min(k, order.size());
  for (std::size_t i = 0; i < top; ++i) {
    const std::string& id = scored[order[i]].first.id;
    for (const EvidenceItem& g : gold) {
      if (g.id == id) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

struct ScoredExample {
  std::vector<std::pair<EvidenceItem, double>> scored;
  std::vector<EvidenceItem> gold;
};

/// Corpus-level recall@k: the mean of per-example recalls.
inline double mean_recall_at_k(const std::vector<ScoredExample>& examples, std::size_t k) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const ScoredExample& example : examples) {
    total += recall_at_k(example.scored, example.gold, k);
  }
  return total / static_cast<double>(examples.size());
}

struct EvalReport {
  double exe_acc = 0.0;
  double prog_acc = 0.0;
  std::size_t n = 0;
  std::vector<std::string> failures;  // ids that missed execution accuracy
};

inline EvalReport evaluate(const std::vector<PredictionRecord>& records,
                           const MetricOptions& opts = {}) {
  EvalReport report;
  report.n = records.size();
  report.exe_acc = execution_accuracy(records, opts);
  report.prog_acc = program_accuracy(records, opts);
  for (const PredictionRecord& record : records) {
    if (!execution_match(record, opts)) report.failures.push_back(record.example_id);
  }
  return report;
}

}  // namespace finprog
