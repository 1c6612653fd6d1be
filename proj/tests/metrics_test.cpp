#include <doctest.h>

#include <algorithm>

#include "finprog/metrics.hpp"
#include "test_helpers.hpp"

using namespace finprog;

namespace {

PredictionRecord make_record(const std::string& id, const std::string& predicted,
                             const std::string& gold) {
  PredictionRecord record;
  record.example_id = id;
  if (!predicted.empty()) record.predicted = parse_program(predicted);
  record.gold_program = parse_program(gold);
  record.gold_answer = eval_program(record.gold_program);
  return record;
}

std::vector<EvidenceItem> make_candidates(std::size_t n) {
  std::vector<EvidenceItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({"e" + std::to_string(i), "sentence " + std::to_string(i),
                     EvidenceItem::Source::Text, -1, false});
  }
  return items;
}

}  // namespace

TEST_CASE("execution accuracy counts tolerant matches") {
  std::vector<PredictionRecord> records;
  records.push_back(make_record("a", "add(279, 320)", "add(320, 279)"));  // exact
  CHECK(execution_accuracy(records) == 1.0);

  // divide(1,3) against a stored 0.3333 within 1e-4 relative
  PredictionRecord rounded = make_record("b", "divide(1, 3)", "divide(1, 3)");
  rounded.gold_answer = ExecValue{0.3333};
  records = {rounded};
  CHECK(execution_accuracy(records) == 1.0);

  records.push_back(make_record("c", "divide(1, subtract(2,2))", "add(1,1)"));  // runtime error
  CHECK(execution_accuracy(records) == doctest::Approx(0.5));

  records.push_back(make_record("d", "", "add(1,1)"));  // parse failure
  CHECK(execution_accuracy(records) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("yes/no answers compare exactly") {
  std::vector<PredictionRecord> records = {make_record("a", "greater(5,3)", "greater(5,3)"),
                                           make_record("b", "greater(3,5)", "greater(5,3)")};
  CHECK(execution_accuracy(records) == doctest::Approx(0.5));
}

TEST_CASE("percent-scale equivalence is opt-in") {
  PredictionRecord record = make_record("a", "add(14.1, 0)", "add(14.1, 0)");
  record.gold_answer = ExecValue{0.141};
  MetricOptions opts;
  CHECK(execution_accuracy({record}, opts) == 0.0);
  opts.percent_equiv = true;
  CHECK(execution_accuracy({record}, opts) == 1.0);
}

TEST_CASE("program accuracy follows rule equivalence") {
  std::vector<PredictionRecord> records = {
      make_record("a", "add(320, 279)", "add(279, 320)"),
      make_record("b", "subtract(3, 5)", "subtract(5, 3)"),
  };
  CHECK(program_accuracy(records) == doctest::Approx(0.5));
  CHECK(program_accuracy({}) == 0.0);
}

TEST_CASE("equivalent predictions also match at execution") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    Program gold = testutil::random_program(rng);
    PredictionRecord record;
    record.example_id = "r";
    record.gold_program = gold;
    record.predicted = testutil::equivalence_preserving_shuffle(gold, rng);
    record.table = TableContext::from_matrix(testutil::test_table());
    try {
      record.gold_answer = eval_program(gold, &record.table);
    } catch (const ExecError&) {
      continue;
    }
    if (record.gold_answer.is_number() && !std::isfinite(record.gold_answer.number())) {
      continue;  // exp overflow draw
    }
    if (prog_equal(*record.predicted, record.gold_program)) {
      CHECK(execution_match(record));
    }
  }
}

TEST_CASE("program accuracy lower-bounds execution accuracy") {
  std::mt19937_64 rng(52);
  for (int set = 0; set < 50; ++set) {
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 20; ++i) {
      Program gold = testutil::random_program(rng, {.max_depth = 3, .allow_table_ops = false});
      PredictionRecord record;
      record.example_id = "r" + std::to_string(i);
      record.gold_program = gold;
      try {
        record.gold_answer = eval_program(gold);
      } catch (const ExecError&) {
        continue;
      }
      if (record.gold_answer.is_number() && !std::isfinite(record.gold_answer.number())) {
        continue;
      }
      const std::size_t roll = uniform_index(rng, 3);
      if (roll == 0) {
        record.predicted = testutil::equivalence_preserving_shuffle(gold, rng);
      } else if (roll == 1) {
        record.predicted =
            testutil::random_program(rng, {.max_depth = 2, .allow_table_ops = false});
      }
      records.push_back(std::move(record));
    }
    CHECK(program_accuracy(records) <= execution_accuracy(records) + 1e-12);
  }
}

TEST_CASE("metrics ignore record order") {
  std::mt19937_64 rng(53);
  std::vector<PredictionRecord> records = {
      make_record("a", "add(1, 2)", "add(2, 1)"),
      make_record("b", "subtract(3, 5)", "subtract(5, 3)"),
      make_record("c", "multiply(2, 4)", "multiply(4, 2)"),
      make_record("d", "", "add(1,1)"),
  };
  const double exe = execution_accuracy(records);
  const double prog = program_accuracy(records);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    shuffle_in_place(records, rng);
    CHECK(execution_accuracy(records) == exe);
    CHECK(program_accuracy(records) == prog);
  }
}

TEST_CASE("recall@k follows the worked examples") {
  const auto candidates = make_candidates(6);
  std::vector<std::pair<EvidenceItem, double>> scored;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored.emplace_back(candidates[i], 1.0 - 0.1 * static_cast<double>(i));
  }
  // gold {e0, e5}: top-3 by score is {e0, e1, e2} so only e0 is caught
  CHECK(recall_at_k(scored, {candidates[0], candidates[5]}, 3) == doctest::Approx(0.5));
  CHECK(recall_at_k(scored, {candidates[0], candidates[1]}, 3) == 1.0);
  CHECK(recall_at_k(scored, {candidates[4], candidates[5]}, 6) == 1.0);
  CHECK(recall_at_k(scored, {candidates[4], candidates[5]}, 100) == 1.0);
  CHECK_THROWS_AS(recall_at_k(scored, {}, 3), MetricsError);
  CHECK_THROWS_AS(recall_at_k(scored, {candidates[0]}, 0), MetricsError);
}

TEST_CASE("ties break by candidate order") {
  const auto candidates = make_candidates(4);
  std::vector<std::pair<EvidenceItem, double>> scored;
  for (const auto& c : candidates) scored.emplace_back(c, 1.0);  // all tied
  CHECK(recall_at_k(scored, {candidates[0]}, 1) == 1.0);
  CHECK(recall_at_k(scored, {candidates[3]}, 1) == 0.0);
  CHECK(recall_at_k(scored, {candidates[3]}, 4) == 1.0);
}

TEST_CASE("recall@k never decreases in k") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 10);
    const auto candidates = make_candidates(n);
    std::vector<std::pair<EvidenceItem, double>> scored;
    for (const auto& c : candidates) scored.emplace_back(c, uniform_real(rng));
    std::vector<EvidenceItem> gold;
    for (const auto& c : candidates) {
      if (uniform_index(rng, 3) == 0) gold.push_back(c);
    }
    if (gold.empty()) gold.push_back(candidates[0]);
    double prev = 0.0;
    for (std::size_t k = 1; k <= n + 2; ++k) {
      const double r = recall_at_k(scored, gold, k);
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
    CHECK(prev == 1.0);
  }
}

TEST_CASE("corpus recall is the mean of per-example recalls") {
  const auto candidates = make_candidates(4);
  std::vector<std::pair<EvidenceItem, double>> scored;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored.emplace_back(candidates[i], 1.0 - 0.1 * static_cast<double>(i));
  }
  const std::vector<ScoredExample> corpus = {
      {scored, {candidates[0]}},                 // recall@1 = 1
      {scored, {candidates[0], candidates[3]}},  // recall@1 = 0.5
  };
  CHECK(mean_recall_at_k(corpus, 1) == doctest::Approx(0.75));
  CHECK(mean_recall_at_k({}, 3) == 0.0);
}

TEST_CASE("the evaluation report collects failures") {
  std::vector<PredictionRecord> records = {
      make_record("good", "add(1, 2)", "add(2, 1)"),
      make_record("bad", "add(1, 1)", "add(2, 2)"),
      make_record("broken", "", "add(2, 2)"),
  };
  const EvalReport report = evaluate(records);
  CHECK(report.n == 3);
  CHECK(report.exe_acc == doctest::Approx(1.0 / 3.0));
  CHECK(report.failures == std::vector<std::string>{"bad", "broken"});
}
