#include <doctest.h>

#include <cmath>

#include "finprog/equivalence.hpp"
#include "test_helpers.hpp"

using namespace finprog;

TEST_CASE("commutative operands sort canonically") {
  const CanonicalProgram canon = canonicalize(parse_program("add(320,279)"));
  REQUIRE(canon.steps.size() == 1);
  CHECK(std::get<CanonNumber>(canon.steps[0].operands[0]).value == 279.0);
  CHECK(std::get<CanonNumber>(canon.steps[0].operands[1]).value == 320.0);
}

TEST_CASE("dead steps are eliminated and references renumbered") {
  const CanonicalProgram canon = canonicalize(parse_program("add(1,2), subtract(9,4)"));
  REQUIRE(canon.steps.size() == 1);
  CHECK(canon.steps[0].op == Op::Subtract);

  // chains of dead steps die together
  const CanonicalProgram chain =
      canonicalize(parse_program("add(1,2), multiply(#0, 3), subtract(9,4)"));
  CHECK(chain.steps.size() == 1);

  CanonicalizeOptions keep;
  keep.eliminate_dead_steps = false;
  CHECK(canonicalize(parse_program("add(1,2), subtract(9,4)"), keep).steps.size() == 2);
}

TEST_CASE("nested and flattened spellings share a canonical form") {
  CHECK(canonicalize(parse_program("divide(1760, add(279,320))")) ==
        canonicalize(parse_program("add(279,320), divide(1760, #0)")));
}

TEST_CASE("program equality follows the worked examples") {
  CHECK(prog_equal(parse_program("add(279,320)"), parse_program("add(320,279)")));
  CHECK_FALSE(prog_equal(parse_program("subtract(5,3)"), parse_program("subtract(3,5)")));
  CHECK(prog_equal(parse_program("divide(10, const_100)"), parse_program("divide(10, 100)")));
  CHECK(prog_equal(parse_program("add(5, 3)"), parse_program("add($5, 3.0)")));
}

TEST_CASE("percent flags are significant") {
  CHECK_FALSE(prog_equal(parse_program("add(14.1, 0)"), parse_program("add(14.1%, 0)")));
}

TEST_CASE("canonicalization is idempotent") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const Program p = testutil::random_program(rng);
    const CanonicalProgram once = canonicalize(p);
    // feed the canonical form back through by reconstructing a program
    Program q;
    for (const CanonStep& step : once.steps) {
      Step s{step.op, {}};
      for (const CanonOperand& operand : step.operands) {
        if (const auto* num = std::get_if<CanonNumber>(&operand)) {
          s.operands.push_back(NumberLiteral{num->value, num->percent, ""});
        } else if (const auto* ref = std::get_if<CanonStepRef>(&operand)) {
          s.operands.push_back(StepRef{ref->index});
        } else {
          s.operands.push_back(RowRef{std::get<CanonRowRef>(operand).name});
        }
      }
      q.steps.push_back(std::move(s));
    }
    CHECK(canonicalize(q) == once);
  }
}

TEST_CASE("equivalence is reflexive, symmetric and transitive on shuffles") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 200; ++i) {
    const Program p = testutil::random_program(rng);
    const Program a = testutil::equivalence_preserving_shuffle(p, rng);
    const Program b = testutil::equivalence_preserving_shuffle(p, rng);
    CHECK(prog_equal(p, p));
    CHECK(prog_equal(p, a));
    CHECK(prog_equal(a, p));
    CHECK(prog_equal(a, b));
    CHECK(prog_equal(p, b));
  }
}

TEST_CASE("declared-equivalent programs execute to the same value") {
  std::mt19937_64 rng(33);
  const auto table = testutil::test_table();
  const TableContext ctx = TableContext::from_matrix(table);
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    const Program p = testutil::random_program(rng);
    const Program q = testutil::equivalence_preserving_shuffle(p, rng);
    REQUIRE(prog_equal(p, q));
    ExecValue vp{0.0};
    try {
      vp = eval_program(p, &ctx);
    } catch (const ExecError&) {
      continue;
    }
    if (vp.is_number() && !std::isfinite(vp.number())) continue;  // exp overflow draw
    const ExecValue vq = eval_program(q, &ctx);
    REQUIRE(vp.is_number() == vq.is_number());
    if (vp.is_number()) {
      const double denom = std::max(1.0, std::abs(vp.number()));
      CHECK(std::abs(vp.number() - vq.number()) / denom <= 1e-9);
    } else {
      CHECK(vp.yes_no() == vq.yes_no());
    }
    ++compared;
  }
  CHECK(compared > 250);
}
