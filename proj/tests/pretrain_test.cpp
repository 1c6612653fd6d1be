#include <doctest.h>

#include <set>

#include "finprog/pretrain.hpp"
#include "test_helpers.hpp"

using namespace finprog;

namespace {

// Two gold table rows, four text distractors, the worked division program.
testutil::ExampleSpec division_spec() {
  testutil::ExampleSpec spec;
  spec.id = "fig1";
  spec.question = "what is the number of units at both sites?";
  spec.text_candidates = {{"Revenue was $170.1 million in 2017.", false},
                          {"The company operated for 7 years.", false},
                          {"Total completions reached 1760 apartments.", false},
                          {"Occupancy stayed high.", false},
                          {"Dividends were unchanged.", false}};
  spec.gold_rows = {1, 2};
  spec.program = "divide(1760, add(279,320))";
  spec.table = {{"", "Units", "Year"},
                {"The Charlotte at Midtown", "279", "2017"},
                {"The acklen west end", "320", "2017"}};
  return spec;
}

std::multiset<std::string> id_set(const IntegritySet& set) {
  std::multiset<std::string> ids;
  for (const EvidenceItem& item : set.evidence) ids.insert(item.id);
  return ids;
}

}  // namespace

TEST_CASE("integrity sets degrade gold count one level at a time") {
  const HybridExample ex = testutil::make_example(division_spec());
  const auto sets = gen_vir_sets(ex, 2, 99);
  REQUIRE(sets.size() == 3);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    CHECK(sets[i].level == i);
    CHECK(sets[i].gold_count == 2 - i);
    CHECK(sets[i].evidence.size() == 2);  // set size stays |gold|
    std::size_t gold_seen = 0;
    for (const EvidenceItem& item : sets[i].evidence) gold_seen += item.is_gold ? 1 : 0;
    CHECK(gold_seen == sets[i].gold_count);
  }
  // level 0 is exactly the gold set
  CHECK(id_set(sets[0]) == std::multiset<std::string>{"table_1", "table_2"});
  // sets are pairwise distinct as sets
  CHECK(id_set(sets[0]) != id_set(sets[1]));
  CHECK(id_set(sets[1]) != id_set(sets[2]));
  CHECK(id_set(sets[0]) != id_set(sets[2]));
}

TEST_CASE("the replacement budget caps at gold size and distractor pool") {
  testutil::ExampleSpec spec = division_spec();
  spec.gold_rows = {1};
  spec.program = "table_sum(The Charlotte at Midtown)";
  const HybridExample ex = testutil::make_example(spec);
  const auto sets = gen_vir_sets(ex, 5, 1);
  CHECK(sets.size() == 2);  // k' = min(5, 1 gold, many distractors) = 1
}

TEST_CASE("generation is deterministic in the seed") {
  const HybridExample ex = testutil::make_example(division_spec());
  const auto a = gen_vir_sets(ex, 2, 7);
  const auto b = gen_vir_sets(ex, 2, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(id_set(a[i]) == id_set(b[i]));
  }
  const auto c = gen_vir_sets(ex, 2, 8);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (id_set(a[i]) != id_set(c[i])) any_difference = true;
  }
  CHECK(any_difference);  // different seed, different draw (holds for this fixture)
}

TEST_CASE("an example without distractors cannot build ranking sets") {
  testutil::ExampleSpec spec;
  spec.id = "all_gold";
  spec.question = "q";
  spec.text_candidates = {{"only gold sentence with 5", true}};
  spec.program = "add(5, 5)";
  spec.table = {};
  const HybridExample ex = testutil::make_example(spec);
  CHECK_THROWS_AS(gen_vir_sets(ex, 1, 0), PretrainError);
}

TEST_CASE("pair construction is the strict upper triangle") {
  const HybridExample ex = testutil::make_example(division_spec());
  const auto sets = gen_vir_sets(ex, 2, 5);
  const auto pairs = gen_vir_pairs(sets, ex.question);
  CHECK(pairs.size() == 3);  // (k'+1) k'/2 with k' = 2
  for (const RankPair& pair : pairs) {
    CHECK(pair.higher.level < pair.lower.level);
    CHECK(pair.higher.gold_count > pair.lower.gold_count);
    CHECK(pair.question == ex.question);
  }
  CHECK(gen_vir_pairs({sets[0]}, ex.question).empty());

  // four sets -> six pairs
  testutil::ExampleSpec wide = division_spec();
  wide.text_candidates.push_back({"More filler about 42 assets.", true});
  const auto more_sets = gen_vir_sets(testutil::make_example(wide), 3, 5);
  REQUIRE(more_sets.size() == 4);
  CHECK(gen_vir_pairs(more_sets, "q").size() == 6);
}

TEST_CASE("noisy sets append one shared distractor") {
  const HybridExample ex = testutil::make_example(division_spec());
  const auto sets = gen_noisy_vir_sets(ex, 2, 11);
  REQUIRE(sets.size() == 3);
  const std::string extra = sets[0].evidence.back().id;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    CHECK(sets[i].evidence.size() == 3);  // |gold| + 1
    CHECK(sets[i].gold_count == 2 - i);
    CHECK(sets[i].evidence.back().id == extra);
    CHECK_FALSE(sets[i].evidence.back().is_gold);
  }
  // the appended distractor never collides with swapped-in distractors
  for (const IntegritySet& set : sets) {
    const auto ids = id_set(set);
    CHECK(ids.count(extra) == 1);
  }
}

TEST_CASE("noisy sets need one distractor beyond the swap chain") {
  testutil::ExampleSpec spec;
  spec.id = "tight";
  spec.question = "q";
  spec.text_candidates = {{"gold sentence with 5", true}, {"lone distractor", false}};
  spec.program = "add(5, 5)";
  spec.table = {};
  const HybridExample ex = testutil::make_example(spec);
  CHECK_THROWS_AS(gen_noisy_vir_sets(ex, 1, 0), PretrainError);
  CHECK(gen_vir_sets(ex, 1, 0).size() == 2);  // the plain variant is fine
}

TEST_CASE("operator examples ground the worked example") {
  const HybridExample ex = testutil::make_example(division_spec());
  const VopResult result = gen_vop(ex);
  // add(279, 320) grounds; divide(1760, #0) has a step reference; the table
  // rows each hold two numeric cells, so no table step exists here
  REQUIRE(result.examples.size() == 1);
  const OperatorExample& example = result.examples[0];
  CHECK(example.label == Op::Add);
  REQUIRE(example.spans.size() == 2);

  // spans re-parse to the operand values
  const auto gold = ex.gold();
  for (std::size_t i = 0; i < example.spans.size(); ++i) {
    const OperandSpan& span = example.spans[i];
    const auto tokens = whitespace_tokenize(gold[span.evidence_index].sentence);
    const std::string token = tokens[span.token_begin].surface;
    const double expected = i == 0 ? 279.0 : 320.0;
    CHECK(parse_numeric(strip_numeric_edges(token)).value == expected);
  }
}

TEST_CASE("steps with references or constants yield no operator example") {
  testutil::ExampleSpec spec;
  spec.id = "refs";
  spec.question = "q";
  spec.text_candidates = {{"values 5 and 3 appear here", true}, {"filler", false}};
  spec.program = "add(5, 3), subtract(5, #0)";
  spec.table = {};
  const HybridExample ex = testutil::make_example(spec);
  const VopResult result = gen_vop(ex);
  REQUIRE(result.examples.size() == 1);
  CHECK(result.examples[0].label == Op::Add);
}

TEST_CASE("operand location normalizes report formatting") {
  testutil::ExampleSpec spec;
  spec.id = "fmt";
  spec.question = "q";
  spec.text_candidates = {{"revenue of $1,760 compares to (320) losses", true},
                          {"noise", false}};
  spec.program = "add(1760, -320)";
  spec.table = {};
  const HybridExample ex = testutil::make_example(spec);
  const VopResult result = gen_vop(ex);
  REQUIRE(result.examples.size() == 1);
  CHECK(result.examples[0].spans[0].token_begin == 2);  // "$1,760"
  CHECK(result.examples[0].spans[1].token_begin == 5);  // "(320)"
}

TEST_CASE("unlocatable operands skip the step with a diagnostic") {
  testutil::ExampleSpec spec;
  spec.id = "miss";
  spec.question = "q";
  spec.text_candidates = {{"only 5 appears", true}, {"filler", false}};
  spec.program = "add(5, 99)";
  spec.table = {};
  const VopResult result = gen_vop(testutil::make_example(spec));
  CHECK(result.examples.empty());
  REQUIRE(result.skipped.size() == 1);
  CHECK(result.skipped[0].find("miss") != std::string::npos);
}

TEST_CASE("table steps use each numeric cell of the referenced row") {
  testutil::ExampleSpec spec;
  spec.id = "tbl";
  spec.question = "what is the sum over the beta fund row?";
  spec.text_candidates = {{"a filler sentence", false}};
  spec.gold_rows = {1};
  spec.program = "table_sum(beta fund)";
  spec.table = {{"", "q1", "q2", "q3"}, {"beta fund", "10", "20", "30"}};
  const HybridExample ex = testutil::make_example(spec);
  const VopResult result = gen_vop(ex);
  REQUIRE(result.examples.size() == 1);
  const OperatorExample& example = result.examples[0];
  CHECK(example.label == Op::TableSum);
  REQUIRE(example.spans.size() == 3);  // one operand per numeric cell
  const auto gold = ex.gold();
  const auto tokens = whitespace_tokenize(gold[0].sentence);
  CHECK(parse_numeric(tokens[example.spans[0].token_begin].surface).value == 10.0);
  CHECK(parse_numeric(tokens[example.spans[1].token_begin].surface).value == 20.0);
  CHECK(parse_numeric(tokens[example.spans[2].token_begin].surface).value == 30.0);
}

TEST_CASE("masking hits exactly one of two occurrences") {
  testutil::ExampleSpec spec;
  spec.id = "mask";
  spec.question = "how many apartments are there in total?";
  spec.text_candidates = {{"a filler sentence about leasing", false}};
  spec.gold_rows = {1, 2};
  spec.program = "add(279, 320)";
  spec.table = {{"", "Units"}, {"The Charlotte at Midtown", "279"},
                {"The acklen west end", "320"}};
  const HybridExample ex = testutil::make_example(spec);

  const auto masked = gen_vkm(ex, 13, {});
  REQUIRE(masked.size() == 1);
  const MaskedExample& example = masked[0];

  std::size_t masked_units = 0;
  std::size_t unmasked_units = 0;
  for (std::size_t i = 0; i < example.tokens.size(); ++i) {
    if (example.tokens[i] == std::string(kMaskToken)) {
      ++masked_units;
    } else if (word_key(example.tokens[i]) == "units") {
      ++unmasked_units;
    }
  }
  CHECK(masked_units == 1);
  CHECK(unmasked_units == 1);
  REQUIRE(example.targets.size() == 1);
  CHECK(word_key(example.targets[0].second) == "units");
  CHECK(example.tokens[example.targets[0].first] == std::string(kMaskToken));
}

TEST_CASE("no qualifying keyphrase means no masked example") {
  testutil::ExampleSpec spec;
  spec.id = "nokp";
  spec.question = "did margins improve?";
  spec.text_candidates = {{"operating margin shrank by 5", true}, {"filler text", false}};
  spec.program = "add(5, 5)";
  spec.table = {};
  CHECK(gen_vkm(testutil::make_example(spec), 1, {}).empty());
}

TEST_CASE("masking is seed-deterministic and mask counts add up") {
  testutil::ExampleSpec spec;
  spec.id = "det";
  spec.question = "what were the total units sold in total units terms?";
  spec.text_candidates = {{"the total units sold grew", true},
                          {"management expects total units to rise", true},
                          {"filler about nothing", false}};
  spec.program = "add(1760, 1760)";
  spec.text_candidates.push_back({"completions were 1760 then 1760 again", true});
  spec.table = {};
  const HybridExample ex = testutil::make_example(spec);

  const auto a = gen_vkm(ex, 5, {});
  const auto b = gen_vkm(ex, 5, {});
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].tokens == b[0].tokens);
  CHECK(a[0].targets == b[0].targets);

  // every target sits on a mask sentinel, and the sentinel count matches
  std::size_t sentinels = 0;
  for (const std::string& token : a[0].tokens) {
    if (token == std::string(kMaskToken)) ++sentinels;
  }
  CHECK(sentinels == a[0].targets.size());
  for (const auto& [position, original] : a[0].targets) {
    CHECK(a[0].tokens[position] == std::string(kMaskToken));
    CHECK_FALSE(original.empty());
  }
}

TEST_CASE("masked spans always carry corpus frequency of at least two") {
  std::mt19937_64 rng(55);
  const std::vector<std::string> pool = {"units", "total", "revenue", "share", "growth",
                                         "cost",  "2017",  "margin"};
  for (int trial = 0; trial < 30; ++trial) {
    testutil::ExampleSpec spec;
    spec.id = "rand" + std::to_string(trial);
    spec.question = "what is the " + pool[uniform_index(rng, pool.size())] + " figure?";
    for (int s = 0; s < 3; ++s) {
      std::string sentence = "the";
      for (int w = 0; w < 5; ++w) sentence += " " + pool[uniform_index(rng, pool.size())];
      sentence += " 7";
      spec.text_candidates.push_back({sentence, s < 2});
    }
    spec.program = "add(7, 7)";
    const HybridExample ex = testutil::make_example(spec);
    const auto evidence = cell_based_gold_evidence(ex);
    auto phrases = extract_textrank_keyphrases(ex.question, evidence, {});
    for (const auto& masked : gen_vkm(ex, trial, {})) {
      // reconstruct each masked run's phrase and confirm it was extracted
      // with frequency >= 2
      for (const auto& [position, original] : masked.targets) {
        bool belongs = false;
        for (const Keyphrase& phrase : phrases) {
          for (const std::string& token : phrase.tokens) {
            if (token == word_key(original)) belongs = true;
          }
          if (belongs) CHECK(phrase.frequency >= 2);
        }
        CHECK(belongs);
      }
    }
  }
}
