#include <doctest.h>

#include <cmath>

#include "finprog/executor.hpp"
#include "test_helpers.hpp"

using namespace finprog;

TEST_CASE("numeric tokens strip report formatting") {
  CHECK(parse_numeric("$1,760").value == 1760.0);
  CHECK_FALSE(parse_numeric("$1,760").percent);
  CHECK(parse_numeric("14.1%").value == 14.1);
  CHECK(parse_numeric("14.1%").percent);
  CHECK(parse_numeric("(7)").value == -7.0);
  CHECK(parse_numeric("(170.1)").value == -170.1);
  CHECK(parse_numeric(" -5 ").value == -5.0);
  CHECK(parse_numeric("(14.1%)").value == -14.1);
  CHECK(parse_numeric("$ 2,350.25").value == 2350.25);
  CHECK_THROWS_AS(parse_numeric("n/a"), ExecError);
  CHECK_THROWS_AS(parse_numeric(""), ExecError);
  CHECK_THROWS_AS(parse_numeric("1 760"), ExecError);
}

TEST_CASE("the worked division example matches an independent calculator") {
  const ExecValue v = eval_program(parse_program("divide(1760, add(279,320))"));
  REQUIRE(v.is_number());
  CHECK(v.number() == 1760.0 / 599.0);
  CHECK(v.number() == doctest::Approx(2.93823038397).epsilon(1e-9));
}

TEST_CASE("table operators aggregate the numeric cells of a row") {
  const std::vector<std::vector<std::string>> matrix = {
      {"", "a", "b", "c"}, {"r", "2", "4", "6"}, {"mixed", "n/a", "10", "x"}};
  const TableContext ctx = TableContext::from_matrix(matrix);
  CHECK(eval_program(parse_program("table_average(r)"), &ctx).number() == 4.0);
  CHECK(eval_program(parse_program("table_sum(r)"), &ctx).number() == 12.0);
  CHECK(eval_program(parse_program("table_max(r)"), &ctx).number() == 6.0);
  CHECK(eval_program(parse_program("table_min(r)"), &ctx).number() == 2.0);
  // non-numeric cells are skipped
  CHECK(eval_program(parse_program("table_sum(mixed)"), &ctx).number() == 10.0);
}

TEST_CASE("greater yields yes/no") {
  CHECK(eval_program(parse_program("greater(5,3)")).yes_no());
  CHECK_FALSE(eval_program(parse_program("greater(3,5)")).yes_no());
}

TEST_CASE("execution errors are precise") {
  const std::vector<std::vector<std::string>> matrix = {{"", "a"}, {"words", "only text"}};
  const TableContext ctx = TableContext::from_matrix(matrix);

  CHECK_THROWS_AS(eval_program(parse_program("divide(1, subtract(2,2))")), ExecError);
  try {
    eval_program(parse_program("table_sum(missing row)"), &ctx);
    FAIL("expected RowNotFound");
  } catch (const ExecError& e) {
    CHECK(e.code() == ExecErrc::RowNotFound);
  }
  try {
    eval_program(parse_program("table_sum(words)"), &ctx);
    FAIL("expected EmptyNumericRow");
  } catch (const ExecError& e) {
    CHECK(e.code() == ExecErrc::EmptyNumericRow);
  }
  try {
    eval_program(parse_program("greater(1,2), add(#0, 1)"));
    FAIL("expected YesNoUsedAsNumber");
  } catch (const ExecError& e) {
    CHECK(e.code() == ExecErrc::YesNoUsedAsNumber);
  }
  try {
    eval_program(parse_program("table_sum(words)"));
    FAIL("expected MissingTable");
  } catch (const ExecError& e) {
    CHECK(e.code() == ExecErrc::MissingTable);
  }
}

TEST_CASE("percent literals evaluate at face value") {
  CHECK(eval_program(parse_program("add(14.1%, 0)")).number() == 14.1);
}

TEST_CASE("duplicate row headers are rejected at ingestion") {
  const std::vector<std::vector<std::string>> matrix = {
      {"", "a"}, {"total", "1"}, {"total ", "2"}};
  CHECK_THROWS_AS(TableContext::from_matrix(matrix), ExecError);
}

TEST_CASE("row lookup tolerates whitespace and casing drift") {
  const std::vector<std::vector<std::string>> matrix = {{"", "a"}, {"Net  Sales", "5"}};
  const TableContext ctx = TableContext::from_matrix(matrix);
  CHECK(ctx.find_row("net sales") != nullptr);
  CHECK(ctx.find_row("Net Sales") != nullptr);
  CHECK(ctx.find_row("gross sales") == nullptr);
}

TEST_CASE("add and multiply commute exactly at execution") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const double a = (uniform_real(rng) - 0.5) * 2.0e6;
    const double b = (uniform_real(rng) - 0.5) * 2.0e6;
    Program ab, ba;
    ab.steps.push_back({Op::Add, {NumberLiteral{a, false, ""}, NumberLiteral{b, false, ""}}});
    ba.steps.push_back({Op::Add, {NumberLiteral{b, false, ""}, NumberLiteral{a, false, ""}}});
    CHECK(eval_program(ab).number() == eval_program(ba).number());
    ab.steps[0].op = Op::Multiply;
    ba.steps[0].op = Op::Multiply;
    CHECK(eval_program(ab).number() == eval_program(ba).number());
  }
}

TEST_CASE("row minimum <= average <= maximum") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::vector<std::string>> matrix = {{"", "a", "b", "c", "d"}};
    std::vector<std::string> row = {"r"};
    const std::size_t cells = 1 + uniform_index(rng, 4);
    for (std::size_t c = 0; c < cells; ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", (uniform_real(rng) - 0.5) * 2000.0);
      row.push_back(buf);
    }
    matrix.push_back(row);
    const TableContext ctx = TableContext::from_matrix(matrix);
    const double lo = eval_program(parse_program("table_min(r)"), &ctx).number();
    const double mid = eval_program(parse_program("table_average(r)"), &ctx).number();
    const double hi = eval_program(parse_program("table_max(r)"), &ctx).number();
    CHECK(lo <= mid);
    CHECK(mid <= hi);
  }
}

TEST_CASE("flattened and nested renderings execute bit-identically") {
  std::mt19937_64 rng(23);
  const auto table = testutil::test_table();
  const TableContext ctx = TableContext::from_matrix(table);
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    const Program p = testutil::random_nested_program(rng);
    ExecValue direct{0.0};
    try {
      direct = eval_program(p, &ctx);
    } catch (const ExecError&) {
      continue;  // division by zero in a random draw
    }
    const Program via_nested = parse_program(render_program(p, ProgramForm::Nested));
    const Program via_flat = parse_program(render_program(p, ProgramForm::Flattened));
    CHECK(eval_program(via_nested, &ctx) == direct);
    CHECK(eval_program(via_flat, &ctx) == direct);
    ++compared;
  }
  CHECK(compared > 200);
}
