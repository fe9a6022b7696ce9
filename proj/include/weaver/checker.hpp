#pragma once

#include "weaver/circuit.hpp"
#include "weaver/device.hpp"
#include "weaver/qaoa.hpp"
#include "weaver/wqasm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace weaver {

// ---------------------------------------------------------------------------
// Dense state-vector simulation
// ---------------------------------------------------------------------------

using Amplitude = std::complex<double>;
using StateVector = std::vector<Amplitude>;

namespace detail {

struct Mat2 {
  Amplitude a, b, c, d; // row-major [[a, b], [c, d]]

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
};

inline Mat2 rxMatrix(double theta) {
  const double h = theta / 2.0;
  const Amplitude i(0.0, 1.0);
  return {std::cos(h), -i * std::sin(h), -i * std::sin(h), std::cos(h)};
}

inline Mat2 ryMatrix(double theta) {
  const double h = theta / 2.0;
  return {std::cos(h), -std::sin(h), std::sin(h), std::cos(h)};
}

inline Mat2 rzMatrix(double theta) {
  const double h = theta / 2.0;
  return {std::exp(Amplitude(0.0, -h)), 0.0, 0.0, std::exp(Amplitude(0.0, h))};
}

/// U3(a, b, c) = RX(a) * RY(b) * RZ(c); the RZ acts first.
inline Mat2 u3Matrix(double a, double b, double c) {
  return rxMatrix(a) * (ryMatrix(b) * rzMatrix(c));
}

inline Mat2 singleQubitMatrix(const LogicalGate& gate) {
  switch (gate.kind) {
  case GateKind::U3:
    return u3Matrix(gate.params[0], gate.params[1], gate.params[2]);
  case GateKind::RZ:
    return rzMatrix(gate.params[0]);
  case GateKind::RX:
    return rxMatrix(gate.params[0]);
  case GateKind::H: {
    const double s = 1.0 / std::sqrt(2.0);
    return {s, s, s, -s};
  }
  case GateKind::X:
    return {0.0, 1.0, 1.0, 0.0};
  default:
    throw std::logic_error("not a single-qubit gate");
  }
}

} // namespace detail

/// Apply one gate in place. Qubit q corresponds to bit q of the basis
/// index (little-endian).
inline void applyGate(StateVector& state, const LogicalGate& gate) {
  const std::size_t dim = state.size();
  switch (gate.kind) {
  case GateKind::U3:
  case GateKind::RZ:
  case GateKind::RX:
  case GateKind::H:
  case GateKind::X: {
    const auto m = detail::singleQubitMatrix(gate);
    const std::size_t bit = std::size_t{1} << gate.qubits[0];
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & bit) != 0) {
        continue;
      }
      const Amplitude lo = state[i];
      const Amplitude hi = state[i | bit];
      state[i] = m.a * lo + m.b * hi;
      state[i | bit] = m.c * lo + m.d * hi;
    }
    return;
  }
  case GateKind::CZ:
  case GateKind::CCZ: {
    std::size_t mask = 0;
    for (const int q : gate.qubits) {
      mask |= std::size_t{1} << q;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & mask) == mask) {
        state[i] = -state[i];
      }
    }
    return;
  }
  case GateKind::CNOT:
  case GateKind::CCNOT: {
    std::size_t controls = 0;
    for (std::size_t k = 0; k + 1 < gate.qubits.size(); ++k) {
      controls |= std::size_t{1} << gate.qubits[k];
    }
    const std::size_t target = std::size_t{1} << gate.qubits.back();
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & controls) == controls && (i & target) == 0) {
        std::swap(state[i], state[i | target]);
      }
    }
    return;
  }
  }
  throw std::logic_error("unhandled gate kind");
}

inline StateVector runCircuit(const LogicalCircuit& circuit,
                              StateVector state) {
  for (const auto& gate : circuit.gates) {
    applyGate(state, gate);
  }
  return state;
}

/// Column-major dense unitary; columns are images of basis states.
inline std::vector<StateVector> circuitUnitary(const LogicalCircuit& circuit) {
  const std::size_t dim = std::size_t{1} << circuit.numQubits;
  std::vector<StateVector> columns;
  columns.reserve(dim);
  for (std::size_t basis = 0; basis < dim; ++basis) {
    StateVector state(dim, Amplitude(0.0, 0.0));
    state[basis] = 1.0;
    columns.push_back(runCircuit(circuit, std::move(state)));
  }
  return columns;
}

/// Max-norm distance between two unitaries after aligning global phase
/// on the first entry of `a` with significant magnitude.
inline double unitaryDistance(const std::vector<StateVector>& a,
                              const std::vector<StateVector>& b) {
  Amplitude phase(1.0, 0.0);
  bool aligned = false;
  for (std::size_t col = 0; col < a.size() && !aligned; ++col) {
    for (std::size_t row = 0; row < a[col].size(); ++row) {
      if (std::abs(a[col][row]) > 1e-6) {
        if (std::abs(b[col][row]) < 1e-12) {
          return 1.0; // zero vs nonzero entry: no phase can fix this
        }
        phase = a[col][row] / b[col][row];
        phase /= std::abs(phase);
        aligned = true;
        break;
      }
    }
  }
  double worst = 0;
  for (std::size_t col = 0; col < a.size(); ++col) {
    for (std::size_t row = 0; row < a[col].size(); ++row) {
      worst = std::max(worst, std::abs(a[col][row] - phase * b[col][row]));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Annotation translation
// ---------------------------------------------------------------------------

struct TranslateIssue {
  int statementIndex = -1; // -1 for trailing annotations
  std::string message;
};

struct TranslateResult {
  LogicalCircuit circuit;
  FpqaState finalState;
  std::vector<TranslateIssue> issues;

  [[nodiscard]] bool ok() const { return issues.empty(); }
};

/// Replay the annotation stream through the device model and realize
/// the circuit the hardware would actually perform: Raman pulses become
/// U3 gates, each Rydberg pulse becomes one CZ per interacting pair and
/// one CCZ per equidistant interacting triple. Components of more than
/// three atoms, unequal triples, and any Table-1 violation are reported
/// as issues.
inline TranslateResult translate(const WqasmProgram& program,
                                 const DeviceSpec& spec) {
  TranslateResult result;
  result.circuit.numQubits = program.numQubits;
  FpqaState state;

  auto handle = [&](const Annotation& ann, int statementIndex) {
    const auto* instr = std::get_if<FpqaInstruction>(&ann);
    if (instr == nullptr) {
      return; // opaque annotations carry no device meaning
    }
    try {
      state = apply(state, *instr, spec);
    } catch (const DeviceError& e) {
      result.issues.push_back({statementIndex, e.what()});
      return;
    }
    if (const auto* rl = std::get_if<RamanLocal>(instr)) {
      result.circuit.append(makeU3(rl->qubit, rl->x, rl->y, rl->z));
      return;
    }
    if (const auto* rg = std::get_if<RamanGlobal>(instr)) {
      for (const auto& [qubit, ref] : state.bindings()) {
        result.circuit.append(makeU3(qubit, rg->x, rg->y, rg->z));
      }
      return;
    }
    if (std::holds_alternative<Rydberg>(*instr)) {
      for (const auto& comp : rydbergComponents(state, spec)) {
        if (comp.size() == 2) {
          result.circuit.append(makeCZ(comp[0], comp[1]));
        } else if (comp.size() == 3) {
          std::vector<Point> pos;
          for (const int q : comp) {
            pos.push_back(*state.qubitPosition(q));
          }
          double lo = 1e300;
          double hi = 0;
          for (int i = 0; i < 3; ++i) {
            const double d = distance(pos[static_cast<std::size_t>(i)],
                                      pos[static_cast<std::size_t>((i + 1) % 3)]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
          }
          if (hi - lo > spec.equidistance_tolerance) {
            result.issues.push_back(
                {statementIndex,
                 "@rydberg: triple q" + std::to_string(comp[0]) + ", q" +
                     std::to_string(comp[1]) + ", q" + std::to_string(comp[2]) +
                     " is not equidistant (spread " + std::to_string(hi - lo) +
                     " um)"});
          } else {
            result.circuit.append(makeCCZ(comp[0], comp[1], comp[2]));
          }
        } else {
          std::string who;
          for (const int q : comp) {
            who += (who.empty() ? "q" : ", q") + std::to_string(q);
          }
          result.issues.push_back(
              {statementIndex, "@rydberg: unintended interaction between " +
                                   std::to_string(comp.size()) + " atoms (" +
                                   who + ")"});
        }
      }
    }
  };

  for (std::size_t i = 0; i < program.statements.size(); ++i) {
    for (const auto& ann : program.statements[i].annotations) {
      handle(ann, static_cast<int>(i));
    }
  }
  for (const auto& ann : program.trailing) {
    handle(ann, -1);
  }
  result.finalState = std::move(state);
  return result;
}

/// The plain gate content of a program, ignoring measure and barrier.
inline LogicalCircuit logicalCircuit(const WqasmProgram& program) {
  LogicalCircuit circuit;
  circuit.numQubits = program.numQubits;
  for (const auto& stmt : program.statements) {
    if (stmt.kind == WqasmStatement::Kind::Gate) {
      circuit.append(stmt.gate);
    }
  }
  return circuit;
}

// ---------------------------------------------------------------------------
// Equivalence checking
// ---------------------------------------------------------------------------

enum class Verdict { Equivalent, StructurallyEquivalentOnly, Mismatch };

inline const char* verdictName(Verdict v) {
  switch (v) {
  case Verdict::Equivalent:
    return "equivalent";
  case Verdict::StructurallyEquivalentOnly:
    return "structurally-equivalent-only";
  case Verdict::Mismatch:
    return "mismatch";
  }
  return "?";
}

namespace detail {

inline bool isDiagonal(const LogicalGate& g) {
  switch (g.kind) {
  case GateKind::RZ:
  case GateKind::CZ:
  case GateKind::CCZ:
    return true;
  case GateKind::U3:
    return g.params[0] == 0.0 && g.params[1] == 0.0;
  default:
    return false;
  }
}

inline bool disjointQubits(const LogicalGate& a, const LogicalGate& b) {
  for (const int q : a.qubits) {
    for (const int p : b.qubits) {
      if (q == p) {
        return false;
      }
    }
  }
  return true;
}

inline bool gatesCommute(const LogicalGate& a, const LogicalGate& b) {
  return disjointQubits(a, b) || (isDiagonal(a) && isDiagonal(b));
}

using GateKey = std::tuple<std::vector<int>, int, std::vector<int>,
                           std::vector<double>>;

inline GateKey gateKey(const LogicalGate& g) {
  std::vector<int> sorted = g.qubits;
  if (g.kind == GateKind::CZ || g.kind == GateKind::CCZ) {
    std::sort(sorted.begin(), sorted.end());
  }
  return {sorted, static_cast<int>(g.kind), g.qubits, g.params};
}

/// Commutation-aware canonical order: bubble every gate as far left as
/// commutations allow whenever that improves the sort key. Equivalent
/// reorderings of commuting gates map to the same sequence.
inline std::vector<LogicalGate> canonicalOrder(const LogicalCircuit& circuit) {
  std::vector<LogicalGate> out;
  out.reserve(circuit.gates.size());
  for (LogicalGate gate : circuit.gates) {
    // CZ and CCZ are symmetric in their operands; normalize so operand
    // order never distinguishes otherwise identical circuits.
    if (gate.kind == GateKind::CZ || gate.kind == GateKind::CCZ) {
      std::sort(gate.qubits.begin(), gate.qubits.end());
    }
    std::size_t pos = out.size();
    while (pos > 0 && gatesCommute(out[pos - 1], gate) &&
           gateKey(gate) < gateKey(out[pos - 1])) {
      --pos;
    }
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), gate);
  }
  return out;
}

} // namespace detail

/// Compare two circuits. Up to `maxUnitaryQubits` the full unitaries
/// are compared (global phase ignored, tolerance 1e-9); above that, the
/// commutation-aware canonical forms are compared structurally, which
/// can certify at most StructurallyEquivalentOnly.
inline Verdict checkEquivalence(const LogicalCircuit& a,
                                const LogicalCircuit& b,
                                int maxUnitaryQubits = 10) {
  if (a.numQubits != b.numQubits) {
    return Verdict::Mismatch;
  }
  if (a.numQubits <= maxUnitaryQubits) {
    const double dist = unitaryDistance(circuitUnitary(a), circuitUnitary(b));
    return dist <= 1e-9 ? Verdict::Equivalent : Verdict::Mismatch;
  }
  const auto ca = detail::canonicalOrder(a);
  const auto cb = detail::canonicalOrder(b);
  return ca == cb ? Verdict::StructurallyEquivalentOnly : Verdict::Mismatch;
}

// ---------------------------------------------------------------------------
// Whole-program verification
// ---------------------------------------------------------------------------

struct CheckReport {
  Verdict verdict = Verdict::Mismatch;
  int numQubits = 0;
  std::size_t gateStatements = 0;
  std::size_t translatedGates = 0;
  std::vector<TranslateIssue> issues;

  [[nodiscard]] nlohmann::json toJson() const {
    nlohmann::json issueList = nlohmann::json::array();
    for (const auto& issue : issues) {
      issueList.push_back({{"statement", issue.statementIndex},
                           {"message", issue.message}});
    }
    return {{"verdict", verdictName(verdict)},
            {"num_qubits", numQubits},
            {"gate_statements", gateStatements},
            {"translated_gates", translatedGates},
            {"issues", issueList}};
  }
};

/// Self-consistency check of an annotated program: the gates its
/// statements declare must match what the annotation stream actually
/// performs on the device. Raman realizations must match their U3
/// statements exactly (same order, qubit, and angles); everything else
/// is checked by circuit equivalence.
inline CheckReport checkProgram(const WqasmProgram& program,
                                const DeviceSpec& spec,
                                int maxUnitaryQubits = 10) {
  CheckReport report;
  report.numQubits = program.numQubits;

  auto translated = translate(program, spec);
  report.issues = translated.issues;
  report.translatedGates = translated.circuit.gates.size();
  const LogicalCircuit declared = logicalCircuit(program);
  report.gateStatements = declared.gates.size();
  if (!translated.ok()) {
    report.verdict = Verdict::Mismatch;
    return report;
  }

  // Exact Raman matching: the sequence of single-qubit realizations
  // must equal the sequence of single-qubit statements gate for gate.
  auto singles = [](const LogicalCircuit& c) {
    std::vector<LogicalGate> out;
    for (const auto& g : c.gates) {
      if (gateArity(g.kind) == 1) {
        out.push_back(g);
      }
    }
    return out;
  };
  const auto declared1q = singles(declared);
  const auto realized1q = singles(translated.circuit);
  if (declared1q != realized1q) {
    report.issues.push_back(
        {-1, "Raman realizations do not exactly match the declared "
             "single-qubit statements (" +
                 std::to_string(realized1q.size()) + " realized vs " +
                 std::to_string(declared1q.size()) + " declared)"});
    report.verdict = Verdict::Mismatch;
    return report;
  }

  report.verdict =
      checkEquivalence(declared, translated.circuit, maxUnitaryQubits);
  if (report.verdict == Verdict::Mismatch) {
    report.issues.push_back(
        {-1, "declared gate statements are not equivalent to the circuit "
             "realized by the annotations"});
  }
  return report;
}

} // namespace weaver
