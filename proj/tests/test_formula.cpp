#include "weaver/formula.hpp"
#include "weaver/rational.hpp"

#include "support/random_formula.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace weaver;

TEST(Rational, Arithmetic) {
  const Rational half(1, 2);
  const Rational third(1, 3);
  EXPECT_EQ(half + third, Rational(5, 6));
  EXPECT_EQ(half * third, Rational(1, 6));
  EXPECT_EQ(half - half, Rational(0));
  EXPECT_EQ(Rational(2, 4), half);
  EXPECT_EQ(Rational(-1, -2), half);
  EXPECT_DOUBLE_EQ(Rational(-3, 8).toDouble(), -0.375);
}

TEST(Dimacs, ParsesExampleWithCommentsAndTrailer) {
  const std::string text = "c example instance\n"
                           "p cnf 6 3\n"
                           "-1 -2 -3 0\n"
                           "4 -5 6 0\n"
                           "3 5 -6 0\n"
                           "%\n"
                           "0\n";
  const auto f = parseDimacs(text);
  EXPECT_EQ(f.numVariables(), 6);
  EXPECT_EQ(f.numClauses(), 3U);
  EXPECT_EQ(f.clauses()[0][0].signedValue(), -1);
  EXPECT_EQ(f.clauses()[2][2].signedValue(), -6);
}

TEST(Dimacs, RoundTrip) {
  std::mt19937 rng(7);
  const auto f = testsupport::randomFormula(12, 30, rng);
  std::ostringstream out;
  writeDimacs(f, out);
  const auto back = parseDimacs(out.str());
  EXPECT_EQ(back.numVariables(), f.numVariables());
  ASSERT_EQ(back.numClauses(), f.numClauses());
  for (std::size_t i = 0; i < f.numClauses(); ++i) {
    EXPECT_EQ(back.clauses()[i], f.clauses()[i]);
  }
}

TEST(Dimacs, RejectsMalformedInput) {
  EXPECT_THROW(parseDimacs("1 2 3 0\n"), ParseError);          // no header
  EXPECT_THROW(parseDimacs("p cnf 3 1\n1 2 0\n"), ParseError); // width 2
  EXPECT_THROW(parseDimacs("p cnf 3 1\n1 2 3 4 0\n"), ParseError); // width 4
  EXPECT_THROW(parseDimacs("p cnf 3 1\n1 2 9 0\n"), ParseError);   // range
  EXPECT_THROW(parseDimacs("p cnf 3 1\n1 1 2 0\n"), ParseError);   // duplicate
  EXPECT_THROW(parseDimacs("p cnf 3 1\n1 -1 2 0\n"), ParseError);  // x and -x
  EXPECT_THROW(parseDimacs("p cnf 3 2\n1 2 3 0\n"), ParseError); // count lies
  EXPECT_THROW(parseDimacs("p cnf 3 1\n1 2 3\n"), ParseError); // unterminated
  EXPECT_THROW(parseDimacs("p cnf 3 1\np cnf 3 1\n"), ParseError); // dup header
  EXPECT_THROW(parseDimacs("p dnf 3 1\n"), ParseError);            // format
}

TEST(Dimacs, LineNumbersInErrors) {
  try {
    parseDimacs("c x\np cnf 3 1\n1 1 2 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
  }
}

TEST(Formula, AddClauseValidation) {
  SatFormula f(3);
  EXPECT_THROW(f.addClause({Literal{1}, Literal{2}, Literal{4}}),
               std::invalid_argument);
  EXPECT_THROW(f.addClause({Literal{1}, Literal{1, true}, Literal{2}}),
               std::invalid_argument);
  f.addClause({Literal{1}, Literal{2}, Literal{3, true}});
  EXPECT_EQ(f.numClauses(), 1U);
}

TEST(Formula, SatisfiedCountTruthTable) {
  const auto f = SatFormula::fromSigned(3, {{-1, -2, -3}});
  // Only the all-true assignment falsifies (not x1 or not x2 or not x3).
  for (unsigned b = 0; b < 8; ++b) {
    const std::vector<bool> assignment{(b & 1U) != 0, (b & 2U) != 0,
                                       (b & 4U) != 0};
    EXPECT_EQ(f.satisfiedCount(assignment), b == 7 ? 0 : 1);
  }
}

TEST(Objective, ClauseIndicatorMatchesTruthTable) {
  // Hand-derived: S(b) = 1 - prod(1 - v(l)) equals the satisfaction
  // indicator on all 8 assignments, for a mixed-polarity clause.
  const Clause clause{Literal{1, false}, Literal{2, true}, Literal{3, false}};
  const auto poly = clauseObjective(clause);
  SatFormula f(3);
  f.addClause(clause);
  for (unsigned b = 0; b < 8; ++b) {
    const std::vector<bool> assignment{(b & 1U) != 0, (b & 2U) != 0,
                                       (b & 4U) != 0};
    EXPECT_EQ(poly.evaluate(assignment), Rational(f.satisfiedCount(assignment)))
        << "assignment " << b;
  }
}

TEST(Objective, FormulaObjectiveCountsSatisfiedClauses) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = testsupport::randomFormula(6, 12, rng);
    const auto poly = formulaObjective(f);
    for (unsigned b = 0; b < 64; ++b) {
      std::vector<bool> assignment(6);
      for (int q = 0; q < 6; ++q) {
        assignment[static_cast<std::size_t>(q)] = ((b >> q) & 1U) != 0;
      }
      ASSERT_EQ(poly.evaluate(assignment),
                Rational(f.satisfiedCount(assignment)));
    }
  }
}

TEST(Objective, DegreeCappedAtThree) {
  ObjectivePolynomial poly;
  EXPECT_THROW(poly.addTerm({1, 2, 3, 4}, Rational(1)), std::invalid_argument);
  EXPECT_THROW(poly.addTerm({2, 1}, Rational(1)), std::invalid_argument);
  poly.addTerm({1, 2}, Rational(1, 2));
  poly.addTerm({1, 2}, Rational(-1, 2));
  EXPECT_TRUE(poly.terms().empty()); // cancelled terms are dropped
}
