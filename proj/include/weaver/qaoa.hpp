#pragma once

#include "weaver/circuit.hpp"
#include "weaver/formula.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace weaver {

struct QaoaParams {
  double gamma = 0.7;
  double beta = 0.3;
  int layers = 1;

  void validate() const {
    if (layers < 1) {
      throw std::invalid_argument("layers must be >= 1");
    }
  }
};

/// Global angle convention: a Z-basis monomial with coefficient w turns
/// into a central RZ of angle kAngleScale * w * gamma, i.e. the cost
/// layer applies exp(-i * 8 * gamma * S(b)) per basis state. The scale
/// is calibrated so the compressed template of an all-negative clause
/// comes out with the 4*gamma target and +2*gamma control-linear
/// angles. A clause monomial over literal polarities s_i then always
/// gets the angle -2 * gamma * prod(s_i).
inline constexpr double kAngleScale = 16.0;

/// U3 parameter triples for the fixed single-qubit gates, in the
/// RX(a)*RY(b)*RZ(c) convention shared with Raman pulses.
inline constexpr double kPi = std::numbers::pi;

inline LogicalGate u3ForH(int qubit) { return makeU3(qubit, kPi, kPi / 2, 0.0); }
inline LogicalGate u3ForX(int qubit) { return makeU3(qubit, kPi, 0.0, 0.0); }
inline LogicalGate u3ForRZ(int qubit, double angle) {
  return makeU3(qubit, 0.0, 0.0, angle);
}
inline LogicalGate u3ForRX(int qubit, double angle) {
  return makeU3(qubit, angle, 0.0, 0.0);
}

/// The objective rewritten over Z eigenvalues via x_i = (1 - z_i) / 2.
/// Keys are sorted 1-based variable tuples, as in ObjectivePolynomial.
class IsingPolynomial {
public:
  using Monomial = std::vector<int>;

  static IsingPolynomial fromObjective(const ObjectivePolynomial& poly) {
    IsingPolynomial ising;
    ising.constant_ = poly.constant();
    for (const auto& [vars, coeff] : poly.terms()) {
      // prod x_i = 2^-d * sum over subsets T of (-1)^|T| * z_T
      const int degree = static_cast<int>(vars.size());
      const Rational base = coeff * Rational(1, std::int64_t{1} << degree);
      for (unsigned mask = 0; mask < (1U << degree); ++mask) {
        Monomial zvars;
        int sign = 1;
        for (int i = 0; i < degree; ++i) {
          if ((mask >> i) & 1U) {
            zvars.push_back(vars[static_cast<std::size_t>(i)]);
            sign = -sign;
          }
        }
        ising.addTerm(std::move(zvars), base * Rational(sign));
      }
    }
    return ising;
  }

  void addTerm(Monomial vars, const Rational& coeff) {
    if (vars.empty()) {
      constant_ += coeff;
      return;
    }
    auto it = terms_.find(vars);
    if (it == terms_.end()) {
      if (!coeff.isZero()) {
        terms_.emplace(std::move(vars), coeff);
      }
    } else {
      it->second += coeff;
      if (it->second.isZero()) {
        terms_.erase(it);
      }
    }
  }

  [[nodiscard]] const std::map<Monomial, Rational>& terms() const {
    return terms_;
  }
  [[nodiscard]] const Rational& constant() const { return constant_; }

  [[nodiscard]] Rational coefficient(const Monomial& vars) const {
    const auto it = terms_.find(vars);
    return it == terms_.end() ? Rational(0) : it->second;
  }

private:
  std::map<Monomial, Rational> terms_;
  Rational constant_;
};

/// CNOT-ladder fragment for one Z-basis term. Degree 1 is a bare RZ,
/// degree 2 and 3 conjugate the RZ with the ladders of the usual
/// RZZ/RZZZ constructions. `vars` holds sorted 1-based variable indices;
/// emitted qubit indices are variable - 1.
inline std::vector<LogicalGate> termFragment(const std::vector<int>& vars,
                                             const Rational& coeff,
                                             double gamma) {
  if (vars.empty() || vars.size() > 3) {
    throw std::invalid_argument("term degree must be between 1 and 3");
  }
  for (std::size_t i = 0; i + 1 < vars.size(); ++i) {
    if (vars[i] >= vars[i + 1]) {
      throw std::invalid_argument("term variables must be sorted and distinct");
    }
  }
  const double angle = kAngleScale * coeff.toDouble() * gamma;
  std::vector<LogicalGate> gates;
  std::vector<int> qubits;
  qubits.reserve(vars.size());
  for (const int v : vars) {
    qubits.push_back(v - 1);
  }
  for (std::size_t i = 0; i + 1 < qubits.size(); ++i) {
    gates.push_back(makeCNOT(qubits[i], qubits[i + 1]));
  }
  gates.push_back(makeRZ(qubits.back(), angle));
  for (std::size_t i = qubits.size() - 1; i-- > 0;) {
    gates.push_back(makeCNOT(qubits[i], qubits[i + 1]));
  }
  return gates;
}

/// Baseline QAOA circuit: Hadamard wall, then per layer the cost terms
/// as ladder fragments (sorted by degree, then variable tuple) followed
/// by the RX(2*beta) mixer wall.
inline LogicalCircuit synthesize(const ObjectivePolynomial& poly,
                                 const QaoaParams& params, int numQubits) {
  params.validate();
  const IsingPolynomial ising = IsingPolynomial::fromObjective(poly);
  for (const auto& [vars, coeff] : ising.terms()) {
    if (vars.back() > numQubits) {
      throw std::out_of_range("polynomial variable exceeds qubit count");
    }
  }

  std::vector<std::pair<IsingPolynomial::Monomial, Rational>> ordered(
      ising.terms().begin(), ising.terms().end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first.size() != b.first.size()) {
                       return a.first.size() < b.first.size();
                     }
                     return a.first < b.first;
                   });

  LogicalCircuit circuit;
  circuit.numQubits = numQubits;
  for (int q = 0; q < numQubits; ++q) {
    circuit.append(makeH(q));
  }
  for (int layer = 0; layer < params.layers; ++layer) {
    for (const auto& [vars, coeff] : ordered) {
      for (auto& gate : termFragment(vars, coeff, params.gamma)) {
        circuit.append(std::move(gate));
      }
    }
    for (int q = 0; q < numQubits; ++q) {
      circuit.append(makeRX(q, 2.0 * params.beta));
    }
  }
  return circuit;
}

/// Rewrite to the native basis {U3, CZ, CCZ}: CNOT/CCNOT become
/// H-conjugated CZ/CCZ on the target, single-qubit gates become U3.
/// Already-native gates pass through unchanged.
inline LogicalCircuit nativize(const LogicalCircuit& circuit) {
  LogicalCircuit native;
  native.numQubits = circuit.numQubits;
  for (const auto& gate : circuit.gates) {
    switch (gate.kind) {
    case GateKind::U3:
    case GateKind::CZ:
    case GateKind::CCZ:
      native.append(gate);
      break;
    case GateKind::H:
      native.append(u3ForH(gate.qubits[0]));
      break;
    case GateKind::X:
      native.append(u3ForX(gate.qubits[0]));
      break;
    case GateKind::RZ:
      native.append(u3ForRZ(gate.qubits[0], gate.params[0]));
      break;
    case GateKind::RX:
      native.append(u3ForRX(gate.qubits[0], gate.params[0]));
      break;
    case GateKind::CNOT:
      native.append(u3ForH(gate.qubits[1]));
      native.append(makeCZ(gate.qubits[0], gate.qubits[1]));
      native.append(u3ForH(gate.qubits[1]));
      break;
    case GateKind::CCNOT:
      native.append(u3ForH(gate.qubits[2]));
      native.append(makeCCZ(gate.qubits[0], gate.qubits[1], gate.qubits[2]));
      native.append(u3ForH(gate.qubits[2]));
      break;
    }
  }
  return native;
}

} // namespace weaver
