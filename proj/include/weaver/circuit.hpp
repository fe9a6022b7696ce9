#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace weaver {

enum class GateKind {
  U3, // three-axis rotation RX(a) * RY(b) * RZ(c), applied z-first
  RZ,
  RX,
  H,
  X,
  CZ,
  CNOT,
  CCZ,
  CCNOT,
};

inline const char* gateName(GateKind kind) {
  switch (kind) {
  case GateKind::U3:
    return "u3";
  case GateKind::RZ:
    return "rz";
  case GateKind::RX:
    return "rx";
  case GateKind::H:
    return "h";
  case GateKind::X:
    return "x";
  case GateKind::CZ:
    return "cz";
  case GateKind::CNOT:
    return "cx";
  case GateKind::CCZ:
    return "ccz";
  case GateKind::CCNOT:
    return "ccx";
  }
  return "?";
}

inline int gateArity(GateKind kind) {
  switch (kind) {
  case GateKind::U3:
  case GateKind::RZ:
  case GateKind::RX:
  case GateKind::H:
  case GateKind::X:
    return 1;
  case GateKind::CZ:
  case GateKind::CNOT:
    return 2;
  case GateKind::CCZ:
  case GateKind::CCNOT:
    return 3;
  }
  return 0;
}

inline int gateParamCount(GateKind kind) {
  switch (kind) {
  case GateKind::U3:
    return 3;
  case GateKind::RZ:
  case GateKind::RX:
    return 1;
  default:
    return 0;
  }
}

/// One logical gate. `qubits` is ordered; for controlled gates the target
/// is the last entry. Angles are radians.
struct LogicalGate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  std::vector<double> params;

  LogicalGate() = default;
  LogicalGate(GateKind k, std::vector<int> q, std::vector<double> p = {})
      : kind(k), qubits(std::move(q)), params(std::move(p)) {
    validate();
  }

  void validate() const {
    if (static_cast<int>(qubits.size()) != gateArity(kind)) {
      throw std::invalid_argument(std::string("gate ") + gateName(kind) +
                                  ": wrong qubit count");
    }
    if (static_cast<int>(params.size()) != gateParamCount(kind)) {
      throw std::invalid_argument(std::string("gate ") + gateName(kind) +
                                  ": wrong parameter count");
    }
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      for (std::size_t j = i + 1; j < qubits.size(); ++j) {
        if (qubits[i] == qubits[j]) {
          throw std::invalid_argument(std::string("gate ") + gateName(kind) +
                                      ": repeated qubit");
        }
      }
    }
  }

  friend bool operator==(const LogicalGate&, const LogicalGate&) = default;
};

inline LogicalGate makeU3(int qubit, double x, double y, double z) {
  return {GateKind::U3, {qubit}, {x, y, z}};
}
inline LogicalGate makeRZ(int qubit, double angle) {
  return {GateKind::RZ, {qubit}, {angle}};
}
inline LogicalGate makeRX(int qubit, double angle) {
  return {GateKind::RX, {qubit}, {angle}};
}
inline LogicalGate makeH(int qubit) { return {GateKind::H, {qubit}}; }
inline LogicalGate makeX(int qubit) { return {GateKind::X, {qubit}}; }
inline LogicalGate makeCNOT(int control, int target) {
  return {GateKind::CNOT, {control, target}};
}
inline LogicalGate makeCZ(int a, int b) { return {GateKind::CZ, {a, b}}; }
inline LogicalGate makeCCNOT(int c1, int c2, int target) {
  return {GateKind::CCNOT, {c1, c2, target}};
}
inline LogicalGate makeCCZ(int a, int b, int c) {
  return {GateKind::CCZ, {a, b, c}};
}

struct LogicalCircuit {
  int numQubits = 0;
  std::vector<LogicalGate> gates;

  void append(LogicalGate gate) {
    for (const int q : gate.qubits) {
      if (q < 0 || q >= numQubits) {
        throw std::out_of_range("qubit index out of range: " + std::to_string(q));
      }
    }
    gates.push_back(std::move(gate));
  }

  friend bool operator==(const LogicalCircuit&, const LogicalCircuit&) = default;
};

} // namespace weaver
