#pragma once

#include "weaver/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace weaver {

/// One literal of a 3-SAT clause. Variables are 1-based, matching the
/// DIMACS convention; `negated` distinguishes -v from v.
struct Literal {
  int variable = 1;
  bool negated = false;

  [[nodiscard]] int signedValue() const { return negated ? -variable : variable; }

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::array<Literal, 3>;

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

/// A MAX-3SAT instance: every clause has exactly three literals over
/// three distinct variables.
class SatFormula {
public:
  SatFormula() = default;
  explicit SatFormula(int numVariables) : numVariables_(numVariables) {
    if (numVariables < 0) {
      throw std::invalid_argument("negative variable count");
    }
  }

  [[nodiscard]] int numVariables() const { return numVariables_; }
  [[nodiscard]] const std::vector<Clause>& clauses() const { return clauses_; }
  [[nodiscard]] std::size_t numClauses() const { return clauses_.size(); }

  void addClause(const Clause& clause) {
    for (const auto& lit : clause) {
      if (lit.variable < 1 || lit.variable > numVariables_) {
        throw std::invalid_argument("variable index out of range: " +
                                    std::to_string(lit.variable));
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (clause[i].variable == clause[j].variable) {
          throw std::invalid_argument(
              clause[i].negated == clause[j].negated
                  ? "duplicate literal in clause"
                  : "complementary literals in clause");
        }
      }
    }
    clauses_.push_back(clause);
  }

  /// Convenience for tests and examples: {{-1,-2,-3},{4,-5,6},...}.
  static SatFormula fromSigned(int numVariables,
                               const std::vector<std::array<int, 3>>& raw) {
    SatFormula f(numVariables);
    for (const auto& c : raw) {
      Clause clause;
      for (int i = 0; i < 3; ++i) {
        if (c[i] == 0) {
          throw std::invalid_argument("zero literal");
        }
        clause[i] = Literal{std::abs(c[i]), c[i] < 0};
      }
      f.addClause(clause);
    }
    return f;
  }

  /// Number of clauses satisfied by an assignment (index i holds the
  /// value of variable i+1).
  [[nodiscard]] int satisfiedCount(const std::vector<bool>& assignment) const {
    int count = 0;
    for (const auto& clause : clauses_) {
      for (const auto& lit : clause) {
        const bool value = assignment.at(static_cast<std::size_t>(lit.variable - 1));
        if (value != lit.negated) {
          ++count;
          break;
        }
      }
    }
    return count;
  }

private:
  int numVariables_ = 0;
  std::vector<Clause> clauses_;
};

/// Multilinear polynomial over {0,1}-valued variables, degree <= 3.
/// Keys are sorted 1-based variable-index tuples; coefficients are exact.
class ObjectivePolynomial {
public:
  using Monomial = std::vector<int>;

  [[nodiscard]] const std::map<Monomial, Rational>& terms() const {
    return terms_;
  }
  [[nodiscard]] const Rational& constant() const { return constant_; }

  void addConstant(const Rational& c) { constant_ += c; }

  void addTerm(Monomial vars, const Rational& coeff) {
    if (vars.empty()) {
      constant_ += coeff;
      return;
    }
    if (vars.size() > 3) {
      throw std::invalid_argument("monomial degree exceeds 3");
    }
    for (std::size_t i = 0; i + 1 < vars.size(); ++i) {
      if (vars[i] >= vars[i + 1]) {
        throw std::invalid_argument("monomial variables must be sorted and distinct");
      }
    }
    auto it = terms_.find(vars);
    if (it == terms_.end()) {
      if (!coeff.isZero()) {
        terms_.emplace(std::move(vars), coeff);
      }
      return;
    }
    it->second += coeff;
    if (it->second.isZero()) {
      terms_.erase(it);
    }
  }

  void add(const ObjectivePolynomial& other) {
    constant_ += other.constant_;
    for (const auto& [vars, coeff] : other.terms_) {
      addTerm(vars, coeff);
    }
  }

  [[nodiscard]] Rational evaluate(const std::vector<bool>& assignment) const {
    Rational value = constant_;
    for (const auto& [vars, coeff] : terms_) {
      bool all = true;
      for (const int v : vars) {
        all = all && assignment.at(static_cast<std::size_t>(v - 1));
      }
      if (all) {
        value += coeff;
      }
    }
    return value;
  }

  friend bool operator==(const ObjectivePolynomial&,
                         const ObjectivePolynomial&) = default;

private:
  std::map<Monomial, Rational> terms_;
  Rational constant_;
};

/// Satisfied-clause indicator as a polynomial: 1 - prod(1 - v(l_i)),
/// where v(x) = x for a positive literal and 1 - x for a negative one.
inline ObjectivePolynomial clauseObjective(const Clause& clause) {
  // Expand prod(1 - v(l_i)) over subsets of the three literals.
  // 1 - v(l) is (1 - x) for positive and x for negative literals, so each
  // factor contributes a constant part and a signed variable part.
  struct Factor {
    int variable;
    Rational constant; // constant part of (1 - v(l))
    Rational linear;   // coefficient of the variable
  };
  std::array<Factor, 3> factors;
  for (int i = 0; i < 3; ++i) {
    const auto& lit = clause[i];
    factors[i] = lit.negated ? Factor{lit.variable, Rational(0), Rational(1)}
                             : Factor{lit.variable, Rational(1), Rational(-1)};
  }

  ObjectivePolynomial poly;
  poly.addConstant(Rational(1));
  for (unsigned mask = 0; mask < 8; ++mask) {
    Rational coeff(-1); // minus the product expansion
    std::vector<int> vars;
    for (int i = 0; i < 3; ++i) {
      if ((mask >> i) & 1U) {
        coeff *= factors[i].linear;
        vars.push_back(factors[i].variable);
      } else {
        coeff *= factors[i].constant;
      }
    }
    if (coeff.isZero()) {
      continue;
    }
    std::sort(vars.begin(), vars.end());
    poly.addTerm(std::move(vars), coeff);
  }
  return poly;
}

/// Sum of clause objectives; evaluates to the satisfied-clause count.
inline ObjectivePolynomial formulaObjective(const SatFormula& formula) {
  ObjectivePolynomial poly;
  for (const auto& clause : formula.clauses()) {
    poly.add(clauseObjective(clause));
  }
  return poly;
}

/// DIMACS CNF parser. Accepts only width-3 clauses; comment lines start
/// with 'c'. Errors carry the offending line number.
inline SatFormula parseDimacs(std::istream& in) {
  std::string line;
  int lineNo = 0;
  int numVars = -1;
  long declaredClauses = -1;
  SatFormula formula;
  std::vector<int> pending;

  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == 'c') {
      continue;
    }
    // Some SATLIB files end with a '%' marker followed by a stray 0.
    if (line[0] == '%') {
      break;
    }
    std::istringstream ls(line);
    if (line[0] == 'p') {
      if (numVars >= 0) {
        throw ParseError(lineNo, "duplicate problem header");
      }
      std::string p;
      std::string fmt;
      ls >> p >> fmt >> numVars >> declaredClauses;
      if (ls.fail() || fmt != "cnf" || numVars < 0 || declaredClauses < 0) {
        throw ParseError(lineNo, "malformed header, expected 'p cnf <vars> <clauses>'");
      }
      formula = SatFormula(numVars);
      continue;
    }
    if (numVars < 0) {
      throw ParseError(lineNo, "clause before 'p cnf' header");
    }
    int value = 0;
    while (ls >> value) {
      if (value == 0) {
        if (pending.size() != 3) {
          throw ParseError(lineNo, "clause has " + std::to_string(pending.size()) +
                                       " literals, expected exactly 3");
        }
        try {
          formula.addClause(Clause{Literal{std::abs(pending[0]), pending[0] < 0},
                                   Literal{std::abs(pending[1]), pending[1] < 0},
                                   Literal{std::abs(pending[2]), pending[2] < 0}});
        } catch (const std::invalid_argument& e) {
          throw ParseError(lineNo, e.what());
        }
        pending.clear();
      } else {
        pending.push_back(value);
      }
    }
    if (!ls.eof()) {
      throw ParseError(lineNo, "unexpected token in clause");
    }
  }
  if (numVars < 0) {
    throw ParseError(lineNo, "missing 'p cnf' header");
  }
  if (!pending.empty()) {
    throw ParseError(lineNo, "unterminated clause at end of file");
  }
  if (declaredClauses >= 0 &&
      formula.numClauses() != static_cast<std::size_t>(declaredClauses)) {
    throw ParseError(lineNo, "clause count mismatch: header declares " +
                                 std::to_string(declaredClauses) + ", found " +
                                 std::to_string(formula.numClauses()));
  }
  return formula;
}

inline SatFormula parseDimacs(const std::string& text) {
  std::istringstream in(text);
  return parseDimacs(in);
}

inline void writeDimacs(const SatFormula& formula, std::ostream& out) {
  out << "p cnf " << formula.numVariables() << ' ' << formula.numClauses() << '\n';
  for (const auto& clause : formula.clauses()) {
    out << clause[0].signedValue() << ' ' << clause[1].signedValue() << ' '
        << clause[2].signedValue() << " 0\n";
  }
}

} // namespace weaver
