#pragma once

#include "weaver/circuit.hpp"
#include "weaver/device.hpp"
#include "weaver/formula.hpp"
#include "weaver/qaoa.hpp"
#include "weaver/wqasm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weaver {

struct CompileError : std::runtime_error {
  enum class Kind { Capacity, Internal };
  CompileError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

// ---------------------------------------------------------------------------
// Clause coloring (DSatur on the clause-conflict graph)
// ---------------------------------------------------------------------------

struct ClauseColoring {
  std::vector<int> colors;
  int numColors = 0;
  std::vector<std::vector<int>> conflictEdges; // adjacency lists, sorted

  [[nodiscard]] bool isProper() const {
    for (std::size_t c = 0; c < conflictEdges.size(); ++c) {
      for (const int other : conflictEdges[c]) {
        if (colors[c] == colors[static_cast<std::size_t>(other)]) {
          return false;
        }
      }
    }
    return true;
  }
};

/// DSatur: repeatedly color the clause with the highest saturation
/// (distinct neighbor colors), breaking ties by degree then lowest
/// index. Color labels are renumbered by first appearance in clause
/// order so the result is dense and stable.
inline ClauseColoring colorClauses(const SatFormula& f) {
  const std::size_t m = f.numClauses();
  ClauseColoring result;
  result.conflictEdges.assign(m, {});

  std::map<int, std::vector<int>> byVariable;
  for (std::size_t c = 0; c < m; ++c) {
    for (const auto& lit : f.clauses()[c]) {
      byVariable[lit.variable].push_back(static_cast<int>(c));
    }
  }
  std::vector<std::set<int>> adjacency(m);
  for (const auto& [var, cs] : byVariable) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        adjacency[static_cast<std::size_t>(cs[i])].insert(cs[j]);
        adjacency[static_cast<std::size_t>(cs[j])].insert(cs[i]);
      }
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    result.conflictEdges[c].assign(adjacency[c].begin(), adjacency[c].end());
  }

  result.colors.assign(m, -1);
  std::vector<std::set<int>> saturation(m);
  for (std::size_t step = 0; step < m; ++step) {
    int best = -1;
    for (std::size_t c = 0; c < m; ++c) {
      if (result.colors[c] != -1) {
        continue;
      }
      if (best == -1) {
        best = static_cast<int>(c);
        continue;
      }
      const auto bi = static_cast<std::size_t>(best);
      const auto satC = saturation[c].size();
      const auto satB = saturation[bi].size();
      if (satC > satB ||
          (satC == satB && adjacency[c].size() > adjacency[bi].size())) {
        best = static_cast<int>(c);
      }
    }
    const auto bi = static_cast<std::size_t>(best);
    int color = 0;
    while (saturation[bi].count(color) != 0) {
      ++color;
    }
    result.colors[bi] = color;
    for (const int n : adjacency[bi]) {
      saturation[static_cast<std::size_t>(n)].insert(color);
    }
  }

  // Renumber by first appearance in clause order.
  std::map<int, int> relabel;
  for (auto& color : result.colors) {
    const auto [it, inserted] =
        relabel.emplace(color, static_cast<int>(relabel.size()));
    color = it->second;
  }
  result.numColors = static_cast<int>(relabel.size());
  return result;
}

// ---------------------------------------------------------------------------
// Shuttle batching (greedy order-preserving partition)
// ---------------------------------------------------------------------------

/// Partition the atoms of `finalOrder` into the minimum number of
/// batches such that each batch appears in the same relative order in
/// `sourceOrder` (first-fit over ascending source positions; minimal by
/// Dilworth's theorem since batches are increasing subsequences).
inline std::vector<std::vector<int>> shuttleBatches(
    const std::vector<int>& sourceOrder, const std::vector<int>& finalOrder) {
  std::map<int, int> sourcePos;
  for (std::size_t i = 0; i < sourceOrder.size(); ++i) {
    sourcePos[sourceOrder[i]] = static_cast<int>(i);
  }
  std::vector<std::vector<int>> batches;
  std::vector<int> lastPos; // source position of each batch's last atom
  for (const int atom : finalOrder) {
    const auto it = sourcePos.find(atom);
    if (it == sourcePos.end()) {
      throw std::invalid_argument("atom " + std::to_string(atom) +
                                  " missing from source order");
    }
    bool placed = false;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      if (lastPos[b] < it->second) {
        batches[b].push_back(atom);
        lastPos[b] = it->second;
        placed = true;
        break;
      }
    }
    if (!placed) {
      batches.push_back({atom});
      lastPos.push_back(it->second);
    }
  }
  return batches;
}

// ---------------------------------------------------------------------------
// Clause roles and gate fragments
// ---------------------------------------------------------------------------

/// Control/target assignment: the two lexicographically smallest
/// variables are controls, the largest is the target. Sigma is +1 for a
/// positive literal. The cost-layer angle of any clause monomial T is
/// -2 * gamma * prod(sigma_i over T).
struct ClauseRoles {
  int varA = 0, varB = 0, varT = 0; // varA < varB < varT
  int sigmaA = 1, sigmaB = 1, sigmaT = 1;

  [[nodiscard]] int qubitA() const { return varA - 1; }
  [[nodiscard]] int qubitB() const { return varB - 1; }
  [[nodiscard]] int qubitT() const { return varT - 1; }
  [[nodiscard]] int positiveControls() const {
    return (sigmaA > 0 ? 1 : 0) + (sigmaB > 0 ? 1 : 0);
  }
  [[nodiscard]] std::pair<int, int> controlPair() const {
    return {varA, varB};
  }
};

inline ClauseRoles clauseRoles(const Clause& clause) {
  std::array<Literal, 3> lits = clause;
  std::sort(lits.begin(), lits.end(),
            [](const Literal& a, const Literal& b) {
              return a.variable < b.variable;
            });
  ClauseRoles r;
  r.varA = lits[0].variable;
  r.varB = lits[1].variable;
  r.varT = lits[2].variable;
  r.sigmaA = lits[0].negated ? -1 : 1;
  r.sigmaB = lits[1].negated ? -1 : 1;
  r.sigmaT = lits[2].negated ? -1 : 1;
  return r;
}

/// Triangle-template compressed clause body (native basis), excluding the
/// shared control-pair channel. Positive controls are X-conjugated
/// around the CCNOT block so the template always sees "all negative"
/// controls; target polarity is absorbed into the RZ signs.
inline std::vector<LogicalGate> compressedCoreGates(const ClauseRoles& r,
                                                    double gamma) {
  std::vector<LogicalGate> gates;
  auto xWall = [&] {
    if (r.sigmaA > 0) {
      gates.push_back(u3ForX(r.qubitA()));
    }
    if (r.sigmaB > 0) {
      gates.push_back(u3ForX(r.qubitB()));
    }
  };
  const double inner = 4.0 * gamma * r.sigmaT;
  const double outer = -4.0 * gamma * r.sigmaT;
  xWall();
  gates.push_back(u3ForH(r.qubitT()));
  gates.push_back(makeCCZ(r.qubitA(), r.qubitB(), r.qubitT()));
  gates.push_back(u3ForH(r.qubitT()));
  gates.push_back(u3ForRZ(r.qubitT(), inner));
  gates.push_back(u3ForH(r.qubitT()));
  gates.push_back(makeCCZ(r.qubitA(), r.qubitB(), r.qubitT()));
  gates.push_back(u3ForH(r.qubitT()));
  xWall();
  gates.push_back(u3ForRZ(r.qubitT(), outer));
  gates.push_back(u3ForRZ(r.qubitA(), -2.0 * gamma * r.sigmaA));
  gates.push_back(u3ForRZ(r.qubitB(), -2.0 * gamma * r.sigmaB));
  return gates;
}

/// Uncompressed clause body: term ladders for the linear terms, the two
/// target quadratics and the cubic term, in native basis. Excludes the
/// shared control-pair channel.
inline std::vector<LogicalGate> ladderCoreGates(const ClauseRoles& r,
                                                double gamma) {
  std::vector<LogicalGate> gates;
  auto cnot = [&](int control, int target) {
    gates.push_back(u3ForH(target));
    gates.push_back(makeCZ(control, target));
    gates.push_back(u3ForH(target));
  };
  gates.push_back(u3ForRZ(r.qubitA(), -2.0 * gamma * r.sigmaA));
  gates.push_back(u3ForRZ(r.qubitB(), -2.0 * gamma * r.sigmaB));
  gates.push_back(u3ForRZ(r.qubitT(), -2.0 * gamma * r.sigmaT));
  // cubic term
  cnot(r.qubitA(), r.qubitB());
  cnot(r.qubitB(), r.qubitT());
  gates.push_back(
      u3ForRZ(r.qubitT(), -2.0 * gamma * r.sigmaA * r.sigmaB * r.sigmaT));
  cnot(r.qubitB(), r.qubitT());
  cnot(r.qubitA(), r.qubitB());
  // target quadratics
  cnot(r.qubitA(), r.qubitT());
  gates.push_back(u3ForRZ(r.qubitT(), -2.0 * gamma * r.sigmaA * r.sigmaT));
  cnot(r.qubitA(), r.qubitT());
  cnot(r.qubitB(), r.qubitT());
  gates.push_back(u3ForRZ(r.qubitT(), -2.0 * gamma * r.sigmaB * r.sigmaT));
  cnot(r.qubitB(), r.qubitT());
  return gates;
}

/// Control-pair quadratic channel, CNOT * RZ * CNOT in native basis.
inline std::vector<LogicalGate> pairChannelGates(int qubitA, int qubitB,
                                                 double angle) {
  return {u3ForH(qubitB), makeCZ(qubitA, qubitB), u3ForH(qubitB),
          u3ForRZ(qubitB, angle),
          u3ForH(qubitB), makeCZ(qubitA, qubitB), u3ForH(qubitB)};
}

inline int countKind(const std::vector<LogicalGate>& gates, GateKind kind) {
  int n = 0;
  for (const auto& g : gates) {
    n += g.kind == kind ? 1 : 0;
  }
  return n;
}

/// Break-even CCZ fidelity for one clause: the f_ccz at which the
/// compressed fragment's pulse-inventory EPS equals the ladder
/// fragment's. Computed from the actual generated fragments.
inline double cczBreakEven(const ClauseRoles& r, const DeviceSpec& spec) {
  const auto comp = compressedCoreGates(r, 0.7);
  const auto lad = ladderCoreGates(r, 0.7);
  const int cczComp = countKind(comp, GateKind::CCZ);
  const int czComp = countKind(comp, GateKind::CZ);
  const int q1Comp = countKind(comp, GateKind::U3);
  const int czLad = countKind(lad, GateKind::CZ);
  const int q1Lad = countKind(lad, GateKind::U3);
  const double logStar =
      ((czLad - czComp) * std::log(spec.fidelities.f_cz) +
       (q1Lad - q1Comp) * std::log(spec.fidelities.f_1q)) /
      cczComp;
  return std::exp(logStar);
}

/// Strictly-beneficial test per the module's EPS model.
inline bool compressionBeneficial(const ClauseRoles& r, const DeviceSpec& spec) {
  return spec.fidelities.f_ccz > cczBreakEven(r, spec);
}

// ---------------------------------------------------------------------------
// Zone layout
// ---------------------------------------------------------------------------

struct TriangleSite {
  Point c1, c2, apex;
};

/// Geometry of the compiled program. Zones are placed on a diagonal so
/// that no two zones overlap in either coordinate; every clause gets an
/// equilateral triangle of SLM traps within its color's zone.
struct ColorZoneLayout {
  double side = 0;       // triangle side
  double apexHeight = 0; // side * sqrt(3) / 2
  double slotPitch = 0;  // x distance between neighboring clause slots
  double homePitch = 0;  // x pitch of the home (parking) strip at y = 0
  double travelY = 0;    // y of the AOD ferry lane
  double dip = 0;        // row dip used to take lifted atoms out of range
  double isoGap = 0;     // x offset of an isolated control from slot center
  int slotsPerZone = 0;
  double parkBase = 0;  // leftmost parked-AOD-column x
  double parkPitch = 0;
  std::vector<Point> zoneOrigins;              // per color: (x0, base y)
  std::vector<std::vector<int>> colorClauses;  // clause ids, within-color order
  std::vector<TriangleSite> sites;             // per clause id
  std::vector<std::vector<int>> colorAtomOrder; // qubits by pickup x

  [[nodiscard]] double slotCenterX(int color, int slot) const {
    return zoneOrigins[static_cast<std::size_t>(color)].x +
           (slot + 0.5) * slotPitch;
  }
  [[nodiscard]] double zoneBaseY(int color) const {
    return zoneOrigins[static_cast<std::size_t>(color)].y;
  }
};

inline ColorZoneLayout buildLayout(const SatFormula& f,
                                   const ClauseColoring& coloring,
                                   const DeviceSpec& spec) {
  ColorZoneLayout layout;
  const double r = spec.rydberg_distance;
  const double dmin = spec.min_trap_distance;
  layout.side = quantize(spec.triangle_side_factor * r);
  layout.apexHeight = quantize(layout.side * std::sqrt(3.0) / 2.0);
  layout.slotPitch = quantize(layout.side + spec.isolation_factor * r + 1.2);
  layout.homePitch = quantize(r + 1.0);
  layout.travelY = quantize(r + 8.0);
  layout.isoGap = quantize(r + 1.0);
  const double halfSide = layout.side / 2.0;
  layout.dip =
      quantize(std::sqrt(std::max(0.0, r * r - halfSide * halfSide)) + 2.0);

  // Feasibility of the choreography under this config.
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw CompileError(CompileError::Kind::Capacity,
                         "infeasible device geometry: " + what);
    }
  };
  require(layout.side <= r, "triangle side exceeds rydberg_distance");
  require(halfSide >= dmin, "triangle half-side below min_trap_distance");
  require(layout.apexHeight <= spec.max_transfer_distance,
          "apex transfer exceeds max_transfer_distance");
  require(layout.isoGap - halfSide <= spec.max_transfer_distance,
          "isolation transfer exceeds max_transfer_distance");
  require(layout.slotPitch - layout.isoGap > r,
          "isolated atoms too close to the neighboring slot");
  require(std::hypot(halfSide, layout.dip) > r,
          "row dip keeps lifted atoms in Rydberg range");
  require(layout.homePitch > r, "home pitch within Rydberg range");

  layout.colorClauses.assign(static_cast<std::size_t>(coloring.numColors), {});
  for (std::size_t c = 0; c < f.numClauses(); ++c) {
    layout.colorClauses[static_cast<std::size_t>(coloring.colors[c])].push_back(
        static_cast<int>(c));
  }
  // Within-color order: by smallest clause variable. Deterministic and
  // invariant under permutations of the input clause list.
  for (auto& group : layout.colorClauses) {
    std::sort(group.begin(), group.end(), [&](int a, int b) {
      return clauseRoles(f.clauses()[static_cast<std::size_t>(a)]).varA <
             clauseRoles(f.clauses()[static_cast<std::size_t>(b)]).varA;
    });
    layout.slotsPerZone =
        std::max(layout.slotsPerZone, static_cast<int>(group.size()));
  }

  const double zoneYPitch = spec.isolation_factor * r;
  const double zoneY0 = 2.0 * layout.travelY;
  require(zoneYPitch - layout.dip >= dmin, "zone y pitch below row dip");
  require(zoneY0 - layout.dip > r, "first zone too close to the home strip");
  const double zoneXPitch = layout.slotsPerZone * layout.slotPitch + 2.0 * r;
  layout.zoneOrigins.clear();
  for (int k = 0; k < coloring.numColors; ++k) {
    layout.zoneOrigins.push_back({quantize(k * zoneXPitch),
                                  quantize(zoneY0 + k * zoneYPitch)});
  }

  layout.sites.assign(f.numClauses(), {});
  layout.colorAtomOrder.assign(static_cast<std::size_t>(coloring.numColors), {});
  for (int k = 0; k < coloring.numColors; ++k) {
    const auto& group = layout.colorClauses[static_cast<std::size_t>(k)];
    for (std::size_t slot = 0; slot < group.size(); ++slot) {
      const int clause = group[slot];
      const double cx = quantize(layout.slotCenterX(k, static_cast<int>(slot)));
      const double cy = layout.zoneBaseY(k);
      auto& site = layout.sites[static_cast<std::size_t>(clause)];
      site.c1 = {quantize(cx - halfSide), cy};
      site.c2 = {quantize(cx + halfSide), cy};
      site.apex = {cx, quantize(cy + layout.apexHeight)};
      const auto roles =
          clauseRoles(f.clauses()[static_cast<std::size_t>(clause)]);
      auto& order = layout.colorAtomOrder[static_cast<std::size_t>(k)];
      order.push_back(roles.qubitA());
      order.push_back(roles.qubitT());
      order.push_back(roles.qubitB());
    }
  }

  const double homeMax = (f.numVariables() > 0 ? f.numVariables() - 1 : 0) *
                         layout.homePitch;
  const double zoneMax =
      coloring.numColors > 0
          ? layout.zoneOrigins.back().x + layout.slotsPerZone * layout.slotPitch
          : 0.0;
  layout.parkBase = quantize(std::max(homeMax, zoneMax) + 2.0 * r);
  layout.parkPitch = layout.homePitch;
  return layout;
}

// ---------------------------------------------------------------------------
// Pulse program
// ---------------------------------------------------------------------------

struct PulseStep {
  FpqaInstruction instruction;
  std::vector<LogicalGate> realized; // gates this instruction implements
  int parallelGroup = 0;             // steps sharing a group run concurrently
};

struct PulseProgram {
  int numQubits = 0;
  std::vector<PulseStep> steps;

  [[nodiscard]] LogicalCircuit realizedCircuit() const {
    LogicalCircuit circuit;
    circuit.numQubits = numQubits;
    for (const auto& step : steps) {
      for (const auto& gate : step.realized) {
        circuit.append(gate);
      }
    }
    return circuit;
  }
};

enum class CompressionMode { Auto, Always, Never };

struct CompileResult {
  ClauseColoring coloring;
  ColorZoneLayout layout;
  PulseProgram program;
  LogicalCircuit logical; // the paired logical circuit (realized gates)
  WqasmProgram wqasm;
  std::vector<bool> clauseCompressed;
  double cczThreshold = 0; // max break-even fidelity over clauses
  int shuttleTrips = 0;
};

namespace detail {

/// Stateful emitter: every instruction is validated through the device
/// model as it is appended, so a successful compile is replayable by
/// construction.
class ProgramBuilder {
public:
  ProgramBuilder(int numQubits, const SatFormula& formula,
                 const ColorZoneLayout& layout, const DeviceSpec& spec)
      : spec_(spec), layout_(layout), formula_(formula) {
    program_.numQubits = numQubits;
    numCols_ = 2 * layout_.slotsPerZone;
  }

  [[nodiscard]] const PulseProgram& program() const { return program_; }
  [[nodiscard]] PulseProgram&& takeProgram() { return std::move(program_); }
  [[nodiscard]] int shuttleTrips() const { return trips_; }
  [[nodiscard]] std::size_t stepCount() const { return program_.steps.size(); }
  [[nodiscard]] const FpqaState& state() const { return state_; }

  int slmHome(int qubit) const { return qubit; }
  int slmC1(int clause) const { return program_.numQubits + 3 * clause; }
  int slmC2(int clause) const { return program_.numQubits + 3 * clause + 1; }
  int slmApex(int clause) const { return program_.numQubits + 3 * clause + 2; }

  void init() {
    const int n = program_.numQubits;
    const int traps = n + 3 * static_cast<int>(formula_.numClauses());
    if (traps > spec_.max_slm_traps) {
      throw CompileError(CompileError::Kind::Capacity,
                         "device capacity: layout requires " +
                             std::to_string(traps) + " SLM traps, device has " +
                             std::to_string(spec_.max_slm_traps));
    }
    if (numCols_ > spec_.max_aod_columns || spec_.max_aod_rows < 1) {
      throw CompileError(CompileError::Kind::Capacity,
                         "device capacity: layout requires " +
                             std::to_string(numCols_) +
                             " AOD columns and 1 row, device has " +
                             std::to_string(spec_.max_aod_columns) + " / " +
                             std::to_string(spec_.max_aod_rows));
    }
    SlmInit slm;
    for (int q = 0; q < n; ++q) {
      slm.positions.push_back({quantize(q * layout_.homePitch), 0.0});
    }
    for (std::size_t c = 0; c < formula_.numClauses(); ++c) {
      const auto& site = layout_.sites[c];
      slm.positions.push_back(site.c1);
      slm.positions.push_back(site.c2);
      slm.positions.push_back(site.apex);
    }
    emit(std::move(slm), {}, newGroup());

    AodInit aod;
    for (int i = 0; i < numCols_; ++i) {
      aod.xs.push_back(parkX(i));
    }
    aod.ys.push_back(layout_.travelY);
    colX_ = aod.xs;
    rowY_ = layout_.travelY;
    emit(std::move(aod), {}, newGroup());

    const int bindGroup = newGroup();
    for (int q = 0; q < n; ++q) {
      emit(Bind{q, TrapRef{TrapRef::Kind::Slm, slmHome(q), -1, -1}}, {},
           bindGroup);
    }
  }

  void ramanGlobal(double x, double y, double z) {
    const double qx = quantize(x);
    const double qy = quantize(y);
    const double qz = quantize(z);
    std::vector<LogicalGate> realized;
    for (const auto& [qubit, ref] : state_.bindings()) {
      realized.push_back(makeU3(qubit, qx, qy, qz));
    }
    emit(RamanGlobal{qx, qy, qz}, std::move(realized), newGroup());
  }

  /// One wall of locally-addressed rotations; distinct qubits, one
  /// parallel group.
  void ramanWall(const std::vector<LogicalGate>& rotations) {
    if (rotations.empty()) {
      return;
    }
    const int group = newGroup();
    for (const auto& gate : rotations) {
      const double x = quantize(gate.params[0]);
      const double y = quantize(gate.params[1]);
      const double z = quantize(gate.params[2]);
      const int qubit = gate.qubits[0];
      emit(RamanLocal{qubit, x, y, z}, {makeU3(qubit, x, y, z)}, group);
    }
  }

  /// Global Rydberg pulse. The expected gates must match the actual
  /// interaction components; a discrepancy is an internal compiler bug.
  void pulse(std::vector<LogicalGate> expected) {
    std::sort(expected.begin(), expected.end(),
              [](const LogicalGate& a, const LogicalGate& b) {
                return a.qubits < b.qubits;
              });
    const auto components = rydbergComponents(state_, spec_);
    std::vector<LogicalGate> realized;
    for (const auto& comp : components) {
      if (comp.size() == 2) {
        realized.push_back(makeCZ(comp[0], comp[1]));
      } else if (comp.size() == 3) {
        realized.push_back(makeCCZ(comp[0], comp[1], comp[2]));
      } else {
        internal("Rydberg component of size " + std::to_string(comp.size()));
      }
    }
    if (realized != expected) {
      internal("Rydberg pulse components do not match the scheduled gates");
    }
    emit(Rydberg{}, std::move(realized), newGroup());
  }

  void moveRowTo(double y) {
    const double offset = quantize(y - rowY_);
    if (offset == 0.0) {
      return;
    }
    emit(Shuttle{Axis::Row, 0, offset}, {}, newGroup());
    rowY_ += offset;
  }

  /// Reposition all columns to `targets` without crossings: rightward
  /// moves right-to-left, then leftward moves left-to-right. Because
  /// current and target coordinates are both sorted with >= Dist_min
  /// gaps, no intermediate configuration violates spacing.
  void repositionColumns(const std::vector<double>& targets) {
    int group = -1;
    auto shift = [&](int i, double offset) {
      if (group == -1) {
        group = newGroup();
      }
      emit(Shuttle{Axis::Column, i, offset}, {}, group);
      colX_[static_cast<std::size_t>(i)] += offset;
    };
    for (int i = numCols_ - 1; i >= 0; --i) {
      const double offset =
          quantize(targets[static_cast<std::size_t>(i)] -
                   colX_[static_cast<std::size_t>(i)]);
      if (offset > 0.0) {
        shift(i, offset);
      }
    }
    group = -1;
    for (int i = 0; i < numCols_; ++i) {
      const double offset =
          quantize(targets[static_cast<std::size_t>(i)] -
                   colX_[static_cast<std::size_t>(i)]);
      if (offset < 0.0) {
        shift(i, offset);
      }
    }
  }

  void transferGroup(const std::vector<std::pair<int, int>>& slmCol) {
    if (slmCol.empty()) {
      return;
    }
    const int group = newGroup();
    for (const auto& [slm, col] : slmCol) {
      emit(Transfer{slm, col, 0}, {}, group);
    }
  }

  [[nodiscard]] std::vector<double> parkedTargets() const {
    std::vector<double> t;
    for (int i = 0; i < numCols_; ++i) {
      t.push_back(parkX(i));
    }
    return t;
  }

  // ----- transport -----

  struct Move {
    int qubit = -1;
    int srcSlm = -1;
    int dstSlm = -1;
    double srcX = 0; // pickup column x = source trap x
    double dstX = 0;
  };

  /// One convoy between two y levels; split into order-preserving
  /// batches, each executed as a single AOD trip via the travel lane.
  void runConvoy(std::vector<Move> moves, double srcY, double dstY) {
    if (moves.empty()) {
      return;
    }
    std::sort(moves.begin(), moves.end(),
              [](const Move& a, const Move& b) { return a.dstX < b.dstX; });
    std::vector<std::vector<Move>> batches;
    std::vector<double> lastSrc;
    for (const auto& move : moves) {
      bool placed = false;
      for (std::size_t b = 0; b < batches.size(); ++b) {
        if (lastSrc[b] < move.srcX &&
            static_cast<int>(batches[b].size()) < numCols_) {
          batches[b].push_back(move);
          lastSrc[b] = move.srcX;
          placed = true;
          break;
        }
      }
      if (!placed) {
        batches.push_back({move});
        lastSrc.push_back(move.srcX);
      }
    }
    for (const auto& batch : batches) {
      ++trips_;
      moveRowTo(srcY);
      auto targets = parkedTargets();
      for (std::size_t i = 0; i < batch.size(); ++i) {
        targets[i] = batch[i].srcX;
      }
      repositionColumns(targets);
      std::vector<std::pair<int, int>> up;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        up.emplace_back(batch[i].srcSlm, static_cast<int>(i));
      }
      transferGroup(up);
      moveRowTo(layout_.travelY);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        targets[i] = batch[i].dstX;
      }
      repositionColumns(targets);
      moveRowTo(dstY);
      std::vector<std::pair<int, int>> down;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        down.emplace_back(batch[i].dstSlm, static_cast<int>(i));
      }
      transferGroup(down);
      moveRowTo(layout_.travelY);
    }
  }

  /// Bring the atoms of color k into its zone: atoms already in another
  /// zone and needed again travel directly, atoms no longer needed are
  /// parked back home, and fresh atoms are fetched from home.
  void transportToColor(int k) {
    std::map<int, int> wantTrap; // qubit -> destination slm trap
    const auto& group = layout_.colorClauses[static_cast<std::size_t>(k)];
    for (const int clause : group) {
      const auto roles =
          clauseRoles(formula_.clauses()[static_cast<std::size_t>(clause)]);
      wantTrap[roles.qubitA()] = slmC1(clause);
      wantTrap[roles.qubitB()] = slmC2(clause);
      wantTrap[roles.qubitT()] = slmApex(clause);
    }
    std::vector<Move> direct;
    std::vector<Move> toHome;
    std::vector<Move> fromHome;
    for (const auto& [qubit, ref] : state_.bindings()) {
      if (ref.kind != TrapRef::Kind::Slm) {
        internal("atom q" + std::to_string(qubit) +
                 " not parked in SLM between colors");
      }
      const bool atHome = ref.slm_index < program_.numQubits;
      const auto want = wantTrap.find(qubit);
      Move move;
      move.qubit = qubit;
      move.srcSlm = ref.slm_index;
      move.srcX = state_.trapPosition(ref).x;
      if (want != wantTrap.end()) {
        if (ref.slm_index == want->second) {
          continue; // already in place (same trap across colors is impossible,
                    // but home-to-home no-ops are)
        }
        move.dstSlm = want->second;
        move.dstX = trapX(want->second);
        if (atHome) {
          fromHome.push_back(move);
        } else {
          direct.push_back(move);
        }
      } else if (!atHome) {
        move.dstSlm = slmHome(qubit);
        move.dstX = trapX(move.dstSlm);
        toHome.push_back(move);
      }
    }
    const double dstY = layout_.zoneBaseY(k);
    if (!direct.empty() || !toHome.empty()) {
      double fromY = 0;
      for (const auto& m : direct) {
        fromY = std::max(fromY, baseYOfSlm(m.srcSlm));
      }
      for (const auto& m : toHome) {
        fromY = std::max(fromY, baseYOfSlm(m.srcSlm));
      }
      runConvoy(std::move(direct), fromY, dstY);
      runConvoy(std::move(toHome), fromY, 0.0);
    }
    runConvoy(std::move(fromHome), 0.0, dstY);
  }

  void transportAllHome() {
    std::vector<Move> moves;
    double fromY = 0;
    for (const auto& [qubit, ref] : state_.bindings()) {
      if (ref.kind != TrapRef::Kind::Slm) {
        internal("atom q" + std::to_string(qubit) + " left in the AOD grid");
      }
      if (ref.slm_index < program_.numQubits) {
        continue;
      }
      Move move;
      move.qubit = qubit;
      move.srcSlm = ref.slm_index;
      move.srcX = state_.trapPosition(ref).x;
      move.dstSlm = slmHome(qubit);
      move.dstX = trapX(move.dstSlm);
      fromY = std::max(fromY, baseYOfSlm(ref.slm_index));
      moves.push_back(move);
    }
    runConvoy(std::move(moves), fromY, 0.0);
  }

  // ----- in-zone choreography -----

  struct Slot {
    int clause = -1;
    ClauseRoles roles;
    double centerX = 0;
    bool compressed = false;
  };

  struct LiftPlan {
    bool c1 = false;
    bool c2 = false;
    bool t = false;
  };

  [[nodiscard]] std::vector<Slot> slotsForColor(int k) const {
    std::vector<Slot> slots;
    const auto& group = layout_.colorClauses[static_cast<std::size_t>(k)];
    for (std::size_t s = 0; s < group.size(); ++s) {
      Slot slot;
      slot.clause = group[s];
      slot.roles =
          clauseRoles(formula_.clauses()[static_cast<std::size_t>(slot.clause)]);
      slot.centerX = quantize(layout_.slotCenterX(k, static_cast<int>(s)));
      slots.push_back(slot);
    }
    return slots;
  }

  /// Lift the planned atoms of every slot onto the AOD and dip the row
  /// so they are out of Rydberg range of the atoms left in the traps.
  void liftEnter(const std::vector<Slot>& slots,
                 const std::vector<LiftPlan>& plans, double baseY) {
    moveRowTo(baseY);
    auto targets = parkedTargets();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const int colA = 2 * static_cast<int>(s);
      const int colB = colA + 1;
      targets[static_cast<std::size_t>(colA)] =
          quantize(slots[s].centerX - layout_.isoGap);
      targets[static_cast<std::size_t>(colB)] =
          plans[s].c2 ? quantize(slots[s].centerX + layout_.side / 2.0)
                      : slots[s].centerX;
    }
    repositionColumns(targets);
    lifted_.clear();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const int colA = 2 * static_cast<int>(s);
      const int colB = colA + 1;
      if (plans[s].c1) {
        lifted_.emplace_back(slmC1(slots[s].clause), colA);
      }
      if (plans[s].t && plans[s].c2) {
        internal("lift plan uses column B twice");
      }
      if (plans[s].t) {
        lifted_.emplace_back(slmApex(slots[s].clause), colB);
      }
      if (plans[s].c2) {
        lifted_.emplace_back(slmC2(slots[s].clause), colB);
      }
    }
    transferGroup(lifted_);
    moveRowTo(quantize(baseY - layout_.dip));
  }

  void liftExit(double baseY) {
    moveRowTo(baseY);
    transferGroup(lifted_);
    lifted_.clear();
  }

  /// Execute all clause fragments of one color plus the pending
  /// control-pair channels. Assumes the color's atoms are in place.
  void executeColor(int k, const std::vector<bool>& clauseCompressed,
                    const std::map<std::pair<int, int>, int>& pairSigmaSum,
                    std::set<std::pair<int, int>>& pairsDone, double gamma) {
    auto slots = slotsForColor(k);
    if (slots.empty()) {
      return;
    }
    const double baseY = layout_.zoneBaseY(k);
    for (auto& slot : slots) {
      slot.compressed = clauseCompressed[static_cast<std::size_t>(slot.clause)];
    }
    const bool anyCompressed =
        std::any_of(slots.begin(), slots.end(),
                    [](const Slot& s) { return s.compressed; });
    const bool anyLadder =
        std::any_of(slots.begin(), slots.end(),
                    [](const Slot& s) { return !s.compressed; });

    auto wall = [&](auto makeGate) {
      std::vector<LogicalGate> gates;
      for (const auto& slot : slots) {
        makeGate(slot, gates);
      }
      ramanWall(gates);
    };

    if (anyCompressed) {
      if (anyLadder) {
        liftEnter(slots, planFor(slots, /*compressedPlan=*/std::nullopt,
                                 /*ladderPlan=*/LiftPlan{true, false, true}),
                  baseY);
      }
      auto xWall = [&] {
        wall([&](const Slot& s, std::vector<LogicalGate>& g) {
          if (!s.compressed) {
            return;
          }
          if (s.roles.sigmaA > 0) {
            g.push_back(u3ForX(s.roles.qubitA()));
          }
          if (s.roles.sigmaB > 0) {
            g.push_back(u3ForX(s.roles.qubitB()));
          }
        });
      };
      auto hTargets = [&] {
        wall([&](const Slot& s, std::vector<LogicalGate>& g) {
          if (s.compressed) {
            g.push_back(u3ForH(s.roles.qubitT()));
          }
        });
      };
      auto cczPulse = [&] {
        std::vector<LogicalGate> expected;
        for (const auto& s : slots) {
          if (s.compressed) {
            expected.push_back(
                makeCCZ(s.roles.qubitA(), s.roles.qubitB(), s.roles.qubitT()));
          }
        }
        pulse(std::move(expected));
      };
      xWall();
      hTargets();
      cczPulse();
      hTargets();
      wall([&](const Slot& s, std::vector<LogicalGate>& g) {
        if (s.compressed) {
          g.push_back(u3ForRZ(s.roles.qubitT(), 4.0 * gamma * s.roles.sigmaT));
        }
      });
      hTargets();
      cczPulse();
      hTargets();
      xWall();
      wall([&](const Slot& s, std::vector<LogicalGate>& g) {
        if (!s.compressed) {
          return;
        }
        g.push_back(u3ForRZ(s.roles.qubitT(), -4.0 * gamma * s.roles.sigmaT));
        g.push_back(u3ForRZ(s.roles.qubitA(), -2.0 * gamma * s.roles.sigmaA));
        g.push_back(u3ForRZ(s.roles.qubitB(), -2.0 * gamma * s.roles.sigmaB));
      });
      if (anyLadder) {
        liftExit(baseY);
      }
    }

    if (anyLadder) {
      wall([&](const Slot& s, std::vector<LogicalGate>& g) {
        if (s.compressed) {
          return;
        }
        g.push_back(u3ForRZ(s.roles.qubitA(), -2.0 * gamma * s.roles.sigmaA));
        g.push_back(u3ForRZ(s.roles.qubitB(), -2.0 * gamma * s.roles.sigmaB));
        g.push_back(u3ForRZ(s.roles.qubitT(), -2.0 * gamma * s.roles.sigmaT));
      });
      bool inConfig = false;
      auto config = [&](LiftPlan ladderPlan) {
        if (inConfig) {
          liftExit(baseY);
        }
        liftEnter(slots,
                  planFor(slots, LiftPlan{true, false, true}, ladderPlan),
                  baseY);
        inConfig = true;
      };
      auto hWallB = [&] {
        wall([&](const Slot& s, std::vector<LogicalGate>& g) {
          if (!s.compressed) {
            g.push_back(u3ForH(s.roles.qubitB()));
          }
        });
      };
      auto hWallT = [&] {
        wall([&](const Slot& s, std::vector<LogicalGate>& g) {
          if (!s.compressed) {
            g.push_back(u3ForH(s.roles.qubitT()));
          }
        });
      };
      auto czPulse = [&](auto pick) {
        std::vector<LogicalGate> expected;
        for (const auto& s : slots) {
          if (!s.compressed) {
            expected.push_back(pick(s.roles));
          }
        }
        pulse(std::move(expected));
      };
      auto rzWallT = [&](auto angleOf) {
        wall([&](const Slot& s, std::vector<LogicalGate>& g) {
          if (!s.compressed) {
            g.push_back(u3ForRZ(s.roles.qubitT(), angleOf(s.roles)));
          }
        });
      };
      const auto czAB = [](const ClauseRoles& r) {
        return makeCZ(r.qubitA(), r.qubitB());
      };
      const auto czBT = [](const ClauseRoles& r) {
        return makeCZ(r.qubitB(), r.qubitT());
      };
      const auto czAT = [](const ClauseRoles& r) {
        return makeCZ(r.qubitA(), r.qubitT());
      };

      // cubic term: CNOT(a,b) CNOT(b,t) RZ CNOT(b,t) CNOT(a,b)
      config(LiftPlan{false, false, true}); // lift target
      hWallB();
      czPulse(czAB);
      hWallB();
      config(LiftPlan{true, false, false}); // lift control a
      hWallT();
      czPulse(czBT);
      hWallT();
      rzWallT([&](const ClauseRoles& r) {
        return -2.0 * gamma * r.sigmaA * r.sigmaB * r.sigmaT;
      });
      hWallT();
      czPulse(czBT);
      hWallT();
      config(LiftPlan{false, false, true});
      hWallB();
      czPulse(czAB);
      hWallB();
      // quadratic (a, t): lift control b
      config(LiftPlan{false, true, false});
      hWallT();
      czPulse(czAT);
      hWallT();
      rzWallT([&](const ClauseRoles& r) {
        return -2.0 * gamma * r.sigmaA * r.sigmaT;
      });
      hWallT();
      czPulse(czAT);
      hWallT();
      // quadratic (b, t): lift control a
      config(LiftPlan{true, false, false});
      hWallT();
      czPulse(czBT);
      hWallT();
      rzWallT([&](const ClauseRoles& r) {
        return -2.0 * gamma * r.sigmaB * r.sigmaT;
      });
      hWallT();
      czPulse(czBT);
      hWallT();
      liftExit(baseY);
    }

    // Control-pair channel: emitted once per pair per QAOA layer with
    // the aggregated angle; pairs with zero aggregate are only ever
    // separated, never pulsed.
    std::vector<bool> active(slots.size(), false);
    bool anyActive = false;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto pair = slots[s].roles.controlPair();
      if (pairsDone.count(pair) != 0) {
        continue;
      }
      pairsDone.insert(pair);
      if (pairSigmaSum.at(pair) != 0) {
        active[s] = true;
        anyActive = true;
      }
    }
    if (anyActive) {
      std::vector<LiftPlan> plans;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        plans.push_back(active[s] ? LiftPlan{false, false, true}
                                  : LiftPlan{true, false, true});
      }
      liftEnter(slots, plans, baseY);
      auto hWall = [&] {
        std::vector<LogicalGate> gates;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (active[s]) {
            gates.push_back(u3ForH(slots[s].roles.qubitB()));
          }
        }
        ramanWall(gates);
      };
      auto czPulse = [&] {
        std::vector<LogicalGate> expected;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (active[s]) {
            expected.push_back(
                makeCZ(slots[s].roles.qubitA(), slots[s].roles.qubitB()));
          }
        }
        pulse(std::move(expected));
      };
      hWall();
      czPulse();
      hWall();
      {
        std::vector<LogicalGate> gates;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (active[s]) {
            const auto pair = slots[s].roles.controlPair();
            gates.push_back(u3ForRZ(slots[s].roles.qubitB(),
                                    -2.0 * gamma * pairSigmaSum.at(pair)));
          }
        }
        ramanWall(gates);
      }
      hWall();
      czPulse();
      hWall();
      liftExit(baseY);
    }
  }

private:
  [[nodiscard]] std::vector<LiftPlan> planFor(
      const std::vector<Slot>& slots, std::optional<LiftPlan> compressedPlan,
      LiftPlan ladderPlan) const {
    std::vector<LiftPlan> plans;
    for (const auto& slot : slots) {
      if (slot.compressed) {
        plans.push_back(compressedPlan.value_or(LiftPlan{}));
      } else {
        plans.push_back(ladderPlan);
      }
    }
    return plans;
  }

  [[nodiscard]] double parkX(int i) const {
    return quantize(layout_.parkBase + i * layout_.parkPitch);
  }

  [[nodiscard]] double trapX(int slm) const {
    return state_.slmTraps()[static_cast<std::size_t>(slm)].position.x;
  }

  [[nodiscard]] double baseYOfSlm(int slm) const {
    const double y = state_.slmTraps()[static_cast<std::size_t>(slm)].position.y;
    // Apex traps sit apexHeight above the zone base line.
    for (const auto& origin : layout_.zoneOrigins) {
      if (std::abs(origin.y - y) < 1e-6 ||
          std::abs(origin.y + layout_.apexHeight - y) < 1e-6) {
        return origin.y;
      }
    }
    return y;
  }

  int newGroup() { return ++groupSeq_; }

  [[noreturn]] void internal(const std::string& what) const {
    throw CompileError(CompileError::Kind::Internal,
                       "internal compiler invariant violated: " + what);
  }

  void emit(FpqaInstruction instr, std::vector<LogicalGate> realized,
            int group) {
    try {
      state_ = apply(state_, instr, spec_);
    } catch (const DeviceError& e) {
      internal(std::string("device rejected generated instruction: ") +
               e.what());
    }
    program_.steps.push_back({std::move(instr), std::move(realized), group});
  }

  const DeviceSpec& spec_;
  const ColorZoneLayout& layout_;
  const SatFormula& formula_;
  FpqaState state_;
  PulseProgram program_;
  std::vector<double> colX_;
  double rowY_ = 0;
  int numCols_ = 0;
  int groupSeq_ = 0;
  int trips_ = 0;
  std::vector<std::pair<int, int>> lifted_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// wQasm assembly
// ---------------------------------------------------------------------------

/// Convert a pulse program to annotated wQasm: every realized gate
/// becomes a statement; the realizing instruction is attached as an
/// annotation to the first statement it produces; movement instructions
/// attach to the next statement (or trail the program).
inline WqasmProgram toWqasm(const PulseProgram& program, bool withMeasure) {
  WqasmProgram out;
  out.numQubits = program.numQubits;
  std::vector<Annotation> pending;
  for (const auto& step : program.steps) {
    pending.emplace_back(step.instruction);
    for (const auto& gate : step.realized) {
      WqasmStatement stmt;
      stmt.annotations = std::move(pending);
      pending.clear();
      stmt.kind = WqasmStatement::Kind::Gate;
      stmt.gate = gate;
      out.statements.push_back(std::move(stmt));
    }
  }
  if (withMeasure) {
    WqasmStatement barrier;
    barrier.annotations = std::move(pending);
    pending.clear();
    barrier.kind = WqasmStatement::Kind::Barrier;
    out.statements.push_back(std::move(barrier));
    WqasmStatement measure;
    measure.kind = WqasmStatement::Kind::Measure;
    for (int q = 0; q < program.numQubits; ++q) {
      measure.qubits.push_back(q);
    }
    if (program.numQubits > 0) {
      out.statements.push_back(std::move(measure));
    }
  }
  out.trailing = std::move(pending);
  return out;
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

inline CompileResult compile(const SatFormula& f, const QaoaParams& params,
                             const DeviceSpec& spec,
                             CompressionMode mode = CompressionMode::Auto) {
  params.validate();
  spec.validate();
  CompileResult result;
  result.coloring = colorClauses(f);
  result.layout = buildLayout(f, result.coloring, spec);

  result.clauseCompressed.assign(f.numClauses(), false);
  result.cczThreshold = 0;
  for (std::size_t c = 0; c < f.numClauses(); ++c) {
    const auto roles = clauseRoles(f.clauses()[c]);
    result.cczThreshold = std::max(result.cczThreshold, cczBreakEven(roles, spec));
    switch (mode) {
    case CompressionMode::Always:
      result.clauseCompressed[c] = true;
      break;
    case CompressionMode::Never:
      result.clauseCompressed[c] = false;
      break;
    case CompressionMode::Auto:
      result.clauseCompressed[c] = compressionBeneficial(roles, spec);
      break;
    }
  }

  std::map<std::pair<int, int>, int> pairSigmaSum;
  for (const auto& clause : f.clauses()) {
    const auto roles = clauseRoles(clause);
    pairSigmaSum[roles.controlPair()] += roles.sigmaA * roles.sigmaB;
  }

  detail::ProgramBuilder builder(f.numVariables(), f, result.layout, spec);
  builder.init();
  builder.ramanGlobal(kPi, kPi / 2.0, 0.0); // Hadamard wall
  for (int layer = 0; layer < params.layers; ++layer) {
    std::set<std::pair<int, int>> pairsDone;
    for (int k = 0; k < result.coloring.numColors; ++k) {
      builder.transportToColor(k);
      builder.executeColor(k, result.clauseCompressed, pairSigmaSum, pairsDone,
                           params.gamma);
    }
    builder.ramanGlobal(2.0 * params.beta, 0.0, 0.0); // mixer wall
  }
  builder.transportAllHome();

  result.shuttleTrips = builder.shuttleTrips();
  result.program = builder.takeProgram();
  result.logical = result.program.realizedCircuit();
  result.wqasm = toWqasm(result.program, /*withMeasure=*/true);
  return result;
}

/// Stand-alone Alg.-2 planner: the movement instructions that turn
/// `fromColor`'s arrangement into `toColor`'s, assuming atoms of
/// fromColor sit in its zone and everyone else is parked at home.
inline std::vector<FpqaInstruction> planShuttles(const SatFormula& f,
                                                 const ColorZoneLayout& layout,
                                                 int fromColor, int toColor,
                                                 const DeviceSpec& spec) {
  detail::ProgramBuilder builder(f.numVariables(), f, layout, spec);
  builder.init();
  builder.transportToColor(fromColor);
  const std::size_t start = builder.stepCount();
  builder.transportToColor(toColor);
  std::vector<FpqaInstruction> instructions;
  const auto& steps = builder.program().steps;
  for (std::size_t i = start; i < steps.size(); ++i) {
    instructions.push_back(steps[i].instruction);
  }
  return instructions;
}

/// Triangle-template compression of a single clause: returns the logical gates and
/// a self-contained FPQA realization (init + placement + pulses). Falls
/// back to the term-ladder realization when compression is not
/// beneficial under `spec`. The control-pair channel is emitted only if
/// the pair is not already in `controlPairsDone`.
inline std::pair<std::vector<LogicalGate>, std::vector<FpqaInstruction>>
compressClause(const Clause& clause,
               std::set<std::pair<int, int>>& controlPairsDone,
               const DeviceSpec& spec, double gamma) {
  const auto roles = clauseRoles(clause);
  SatFormula f(roles.varT);
  f.addClause(clause);
  const auto coloring = colorClauses(f);
  const auto layout = buildLayout(f, coloring, spec);
  const bool compressed = compressionBeneficial(roles, spec);

  std::map<std::pair<int, int>, int> pairSigmaSum;
  pairSigmaSum[roles.controlPair()] = roles.sigmaA * roles.sigmaB;

  detail::ProgramBuilder builder(f.numVariables(), f, layout, spec);
  builder.init();
  builder.transportToColor(0);
  std::set<std::pair<int, int>> done = controlPairsDone;
  builder.executeColor(0, {compressed}, pairSigmaSum, done, gamma);
  controlPairsDone = done;

  std::vector<LogicalGate> gates;
  std::vector<FpqaInstruction> instructions;
  for (const auto& step : builder.program().steps) {
    instructions.push_back(step.instruction);
    for (const auto& gate : step.realized) {
      gates.push_back(gate);
    }
  }
  return {std::move(gates), std::move(instructions)};
}

} // namespace weaver
