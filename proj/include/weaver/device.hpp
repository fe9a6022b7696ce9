#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace weaver {

struct PulseDurations {
  double raman_local = 1.0e-6;  // seconds
  double raman_global = 1.0e-6; // seconds
  double rydberg = 0.27e-6;     // seconds
  double transfer = 15.0e-6;    // seconds
};

struct Fidelities {
  double f_1q = 0.999;
  double f_cz = 0.995;
  double f_ccz = 0.98;
  double f_transfer = 0.999;
  double f_move = 1.0; // per shuttle instruction; 1.0 disables movement loss
};

/// Hardware parameters. Distances are micrometers, durations seconds.
/// The shipped defaults are placeholders in the plausible range for
/// Rubidium-atom arrays, not measured values; override via config file.
struct DeviceSpec {
  double min_trap_distance = 5.0;      // Dist_min
  double max_transfer_distance = 15.0; // Dist_Transfer_Max
  double rydberg_distance = 12.0;      // Rydberg_dist
  double move_speed = 5.5e5;           // micrometers per second
  PulseDurations durations;
  Fidelities fidelities;
  double equidistance_tolerance = 0.12; // micrometers, CCZ triple spread
  double isolation_factor = 2.5;        // zone pitch in Rydberg radii
  double triangle_side_factor = 0.9;    // clause triangle side in Rydberg radii
  double coherence_time = 0.0;          // seconds; 0 disables idle decoherence
  int max_slm_traps = 100000;
  int max_aod_columns = 512;
  int max_aod_rows = 8;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0)) {
        throw std::invalid_argument(std::string(name) + " must be positive");
      }
    };
    positive(min_trap_distance, "min_trap_distance");
    positive(max_transfer_distance, "max_transfer_distance");
    positive(rydberg_distance, "rydberg_distance");
    positive(move_speed, "move_speed");
    positive(durations.raman_local, "durations.raman_local");
    positive(durations.raman_global, "durations.raman_global");
    positive(durations.rydberg, "durations.rydberg");
    positive(durations.transfer, "durations.transfer");
    auto fidelity = [](double v, const char* name) {
      if (!(v > 0) || v > 1.0) {
        throw std::invalid_argument(std::string(name) + " must be in (0, 1]");
      }
    };
    fidelity(fidelities.f_1q, "fidelities.f_1q");
    fidelity(fidelities.f_cz, "fidelities.f_cz");
    fidelity(fidelities.f_ccz, "fidelities.f_ccz");
    fidelity(fidelities.f_transfer, "fidelities.f_transfer");
    fidelity(fidelities.f_move, "fidelities.f_move");
    if (!(equidistance_tolerance >= 0)) {
      throw std::invalid_argument("equidistance_tolerance must be >= 0");
    }
    if (!(coherence_time >= 0)) {
      throw std::invalid_argument("coherence_time must be >= 0");
    }
    if (triangle_side_factor * rydberg_distance <= min_trap_distance) {
      throw std::invalid_argument(
          "triangle side must exceed min_trap_distance; raise rydberg_distance "
          "or triangle_side_factor");
    }
  }
};

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class Axis { Row, Column };

// --- instruction variants (Table-1 annotations) ---

struct SlmInit {
  std::vector<Point> positions;

  friend bool operator==(const SlmInit&, const SlmInit&) = default;
};
struct AodInit {
  std::vector<double> xs; // column coordinates, strictly increasing
  std::vector<double> ys; // row coordinates, strictly increasing

  friend bool operator==(const AodInit&, const AodInit&) = default;
};
struct TrapRef {
  enum class Kind { Slm, Aod } kind = Kind::Slm;
  int slm_index = -1;
  int aod_col = -1;
  int aod_row = -1;

  friend bool operator==(const TrapRef&, const TrapRef&) = default;
};
struct Bind {
  int qubit = -1;
  TrapRef trap;

  friend bool operator==(const Bind&, const Bind&) = default;
};
struct Transfer {
  int slm_index = -1;
  int aod_col = -1;
  int aod_row = -1;

  friend bool operator==(const Transfer&, const Transfer&) = default;
};
struct Shuttle {
  Axis axis = Axis::Row;
  int index = -1;
  double offset = 0; // micrometers

  friend bool operator==(const Shuttle&, const Shuttle&) = default;
};
struct RamanLocal {
  int qubit = -1;
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const RamanLocal&, const RamanLocal&) = default;
};
struct RamanGlobal {
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const RamanGlobal&, const RamanGlobal&) = default;
};
struct Rydberg {
  friend bool operator==(const Rydberg&, const Rydberg&) = default;
};

using FpqaInstruction = std::variant<SlmInit, AodInit, Bind, Transfer, Shuttle,
                                     RamanLocal, RamanGlobal, Rydberg>;

inline const char* instructionName(const FpqaInstruction& instr) {
  struct Visitor {
    const char* operator()(const SlmInit&) const { return "@slm"; }
    const char* operator()(const AodInit&) const { return "@aod"; }
    const char* operator()(const Bind&) const { return "@bind"; }
    const char* operator()(const Transfer&) const { return "@transfer"; }
    const char* operator()(const Shuttle&) const { return "@shuttle"; }
    const char* operator()(const RamanLocal&) const { return "@raman local"; }
    const char* operator()(const RamanGlobal&) const { return "@raman global"; }
    const char* operator()(const Rydberg&) const { return "@rydberg"; }
  };
  return std::visit(Visitor{}, instr);
}

struct DeviceError : std::runtime_error {
  DeviceError(std::string instruction, std::string constraint, std::string detail)
      : std::runtime_error(instruction + ": " + constraint + " (" + detail + ")"),
        instruction(std::move(instruction)), constraint(std::move(constraint)),
        detail(std::move(detail)) {}
  std::string instruction;
  std::string constraint;
  std::string detail;
};

/// Simulated device state. Value type: apply() returns a new state.
class FpqaState {
public:
  struct SlmTrap {
    Point position;
    int occupant = -1; // qubit id, -1 when empty
  };

  [[nodiscard]] const std::vector<SlmTrap>& slmTraps() const { return slm_; }
  [[nodiscard]] const std::vector<double>& aodRows() const { return rows_; }
  [[nodiscard]] const std::vector<double>& aodCols() const { return cols_; }
  [[nodiscard]] const std::map<std::pair<int, int>, int>& aodOccupancy() const {
    return aodOcc_; // key is (col, row)
  }
  [[nodiscard]] const std::map<int, TrapRef>& bindings() const { return bindings_; }

  [[nodiscard]] bool initialized() const { return !slm_.empty() || !rows_.empty(); }

  [[nodiscard]] std::optional<Point> qubitPosition(int qubit) const {
    const auto it = bindings_.find(qubit);
    if (it == bindings_.end()) {
      return std::nullopt;
    }
    return trapPosition(it->second);
  }

  [[nodiscard]] Point trapPosition(const TrapRef& ref) const {
    if (ref.kind == TrapRef::Kind::Slm) {
      return slm_.at(static_cast<std::size_t>(ref.slm_index)).position;
    }
    return {cols_.at(static_cast<std::size_t>(ref.aod_col)),
            rows_.at(static_cast<std::size_t>(ref.aod_row))};
  }

  [[nodiscard]] std::vector<std::pair<int, Point>> occupiedPositions() const {
    std::vector<std::pair<int, Point>> out;
    out.reserve(bindings_.size());
    for (const auto& [qubit, ref] : bindings_) {
      out.emplace_back(qubit, trapPosition(ref));
    }
    return out;
  }

  /// Full invariant audit; used by tests and the fuzz harness.
  void validateInvariants(const DeviceSpec& spec) const {
    checkStrictlyIncreasing(rows_, "row", spec);
    checkStrictlyIncreasing(cols_, "column", spec);
    checkAtomSpacing(spec, "invariant");
  }

  friend FpqaState apply(const FpqaState& state, const FpqaInstruction& instr,
                         const DeviceSpec& spec);

private:
  static constexpr double kEps = 1e-9;

  static void checkStrictlyIncreasing(const std::vector<double>& coords,
                                      const char* what, const DeviceSpec& spec) {
    for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
      if (coords[i + 1] - coords[i] < spec.min_trap_distance - kEps) {
        throw DeviceError("@aod", std::string(what) + " spacing",
                          "adjacent " + std::string(what) + "s at " +
                              std::to_string(coords[i]) + " and " +
                              std::to_string(coords[i + 1]));
      }
    }
  }

  /// All occupied traps must stay min_trap_distance apart. Sweep over
  /// x-sorted positions so the common case costs O(A log A).
  void checkAtomSpacing(const DeviceSpec& spec, const char* instruction) const {
    auto atoms = occupiedPositions();
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
      return a.second.x < b.second.x;
    });
    const double d = spec.min_trap_distance;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for (std::size_t j = i + 1; j < atoms.size(); ++j) {
        if (atoms[j].second.x - atoms[i].second.x >= d) {
          break;
        }
        if (distance(atoms[i].second, atoms[j].second) < d - kEps) {
          throw DeviceError(instruction, "atom spacing",
                            "qubits q" + std::to_string(atoms[i].first) + " and q" +
                                std::to_string(atoms[j].first) + " closer than " +
                                std::to_string(d) + " um");
        }
      }
    }
  }

  std::vector<SlmTrap> slm_;
  std::vector<double> rows_;
  std::vector<double> cols_;
  std::map<std::pair<int, int>, int> aodOcc_; // (col, row) -> qubit
  std::map<int, TrapRef> bindings_;
};

/// Pure transition function implementing the Table-1 semantics.
inline FpqaState apply(const FpqaState& state, const FpqaInstruction& instr,
                       const DeviceSpec& spec) {
  constexpr double kEps = 1e-9;
  FpqaState next = state;

  if (const auto* slm = std::get_if<SlmInit>(&instr)) {
    if (!state.slm_.empty()) {
      throw DeviceError("@slm", "reinitialization", "SLM layer already defined");
    }
    if (static_cast<int>(slm->positions.size()) > spec.max_slm_traps) {
      throw DeviceError("@slm", "device capacity",
                        "requires " + std::to_string(slm->positions.size()) +
                            " traps, device has " +
                            std::to_string(spec.max_slm_traps));
    }
    for (std::size_t i = 0; i < slm->positions.size(); ++i) {
      for (std::size_t j = i + 1; j < slm->positions.size(); ++j) {
        if (distance(slm->positions[i], slm->positions[j]) <
            spec.min_trap_distance - kEps) {
          throw DeviceError("@slm", "trap spacing",
                            "traps " + std::to_string(i) + " and " +
                                std::to_string(j) + " closer than Dist_min");
        }
      }
    }
    for (const auto& p : slm->positions) {
      next.slm_.push_back({p, -1});
    }
    return next;
  }

  if (const auto* aod = std::get_if<AodInit>(&instr)) {
    if (!state.rows_.empty() || !state.cols_.empty()) {
      throw DeviceError("@aod", "reinitialization", "AOD grid already defined");
    }
    if (static_cast<int>(aod->xs.size()) > spec.max_aod_columns ||
        static_cast<int>(aod->ys.size()) > spec.max_aod_rows) {
      throw DeviceError("@aod", "device capacity",
                        "requires " + std::to_string(aod->xs.size()) + " columns / " +
                            std::to_string(aod->ys.size()) + " rows, device has " +
                            std::to_string(spec.max_aod_columns) + " / " +
                            std::to_string(spec.max_aod_rows));
    }
    for (std::size_t i = 0; i + 1 < aod->xs.size(); ++i) {
      if (aod->xs[i + 1] - aod->xs[i] < spec.min_trap_distance - kEps) {
        throw DeviceError("@aod", "column spacing",
                          "columns at " + std::to_string(aod->xs[i]) + " and " +
                              std::to_string(aod->xs[i + 1]));
      }
    }
    for (std::size_t i = 0; i + 1 < aod->ys.size(); ++i) {
      if (aod->ys[i + 1] - aod->ys[i] < spec.min_trap_distance - kEps) {
        throw DeviceError("@aod", "row spacing",
                          "rows at " + std::to_string(aod->ys[i]) + " and " +
                              std::to_string(aod->ys[i + 1]));
      }
    }
    next.cols_ = aod->xs;
    next.rows_ = aod->ys;
    return next;
  }

  if (const auto* bind = std::get_if<Bind>(&instr)) {
    if (state.bindings_.count(bind->qubit) != 0) {
      throw DeviceError("@bind", "qubit already bound",
                        "q" + std::to_string(bind->qubit));
    }
    if (bind->trap.kind == TrapRef::Kind::Slm) {
      if (bind->trap.slm_index < 0 ||
          bind->trap.slm_index >= static_cast<int>(state.slm_.size())) {
        throw DeviceError("@bind", "unknown SLM trap",
                          "index " + std::to_string(bind->trap.slm_index));
      }
      auto& trap = next.slm_[static_cast<std::size_t>(bind->trap.slm_index)];
      if (trap.occupant != -1) {
        throw DeviceError("@bind", "trap occupied",
                          "slm " + std::to_string(bind->trap.slm_index) +
                              " already holds q" + std::to_string(trap.occupant));
      }
      trap.occupant = bind->qubit;
    } else {
      if (bind->trap.aod_col < 0 ||
          bind->trap.aod_col >= static_cast<int>(state.cols_.size()) ||
          bind->trap.aod_row < 0 ||
          bind->trap.aod_row >= static_cast<int>(state.rows_.size())) {
        throw DeviceError("@bind", "unknown AOD site",
                          "(" + std::to_string(bind->trap.aod_col) + ", " +
                              std::to_string(bind->trap.aod_row) + ")");
      }
      const auto key = std::make_pair(bind->trap.aod_col, bind->trap.aod_row);
      if (next.aodOcc_.count(key) != 0) {
        throw DeviceError("@bind", "trap occupied",
                          "aod (" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ")");
      }
      next.aodOcc_[key] = bind->qubit;
    }
    next.bindings_[bind->qubit] = bind->trap;
    next.checkAtomSpacing(spec, "@bind");
    return next;
  }

  if (const auto* tr = std::get_if<Transfer>(&instr)) {
    if (tr->slm_index < 0 || tr->slm_index >= static_cast<int>(state.slm_.size())) {
      throw DeviceError("@transfer", "unknown SLM trap",
                        "index " + std::to_string(tr->slm_index));
    }
    if (tr->aod_col < 0 || tr->aod_col >= static_cast<int>(state.cols_.size()) ||
        tr->aod_row < 0 || tr->aod_row >= static_cast<int>(state.rows_.size())) {
      throw DeviceError("@transfer", "unknown AOD site",
                        "(" + std::to_string(tr->aod_col) + ", " +
                            std::to_string(tr->aod_row) + ")");
    }
    auto& trap = next.slm_[static_cast<std::size_t>(tr->slm_index)];
    const Point slmPos = trap.position;
    const Point aodPos{state.cols_[static_cast<std::size_t>(tr->aod_col)],
                       state.rows_[static_cast<std::size_t>(tr->aod_row)]};
    const double d = distance(slmPos, aodPos);
    if (d > spec.max_transfer_distance + kEps) {
      throw DeviceError("@transfer", "distance exceeds Dist_Transfer_Max",
                        "slm " + std::to_string(tr->slm_index) + " at (" +
                            std::to_string(slmPos.x) + ", " + std::to_string(slmPos.y) +
                            ") to aod (" + std::to_string(aodPos.x) + ", " +
                            std::to_string(aodPos.y) + "), " + std::to_string(d) +
                            " um");
    }
    const auto key = std::make_pair(tr->aod_col, tr->aod_row);
    const auto occ = next.aodOcc_.find(key);
    const int slmQubit = trap.occupant;
    const int aodQubit = occ == next.aodOcc_.end() ? -1 : occ->second;
    if (slmQubit != -1 && aodQubit != -1) {
      throw DeviceError("@transfer", "destination occupied",
                        "slm " + std::to_string(tr->slm_index) + " holds q" +
                            std::to_string(slmQubit) + ", aod site holds q" +
                            std::to_string(aodQubit));
    }
    if (slmQubit == -1 && aodQubit == -1) {
      throw DeviceError("@transfer", "no atom to transfer",
                        "both traps empty at slm " + std::to_string(tr->slm_index));
    }
    if (slmQubit != -1) {
      trap.occupant = -1;
      next.aodOcc_[key] = slmQubit;
      next.bindings_[slmQubit] =
          TrapRef{TrapRef::Kind::Aod, -1, tr->aod_col, tr->aod_row};
    } else {
      next.aodOcc_.erase(key);
      trap.occupant = aodQubit;
      next.bindings_[aodQubit] = TrapRef{TrapRef::Kind::Slm, tr->slm_index, -1, -1};
    }
    next.checkAtomSpacing(spec, "@transfer");
    return next;
  }

  if (const auto* sh = std::get_if<Shuttle>(&instr)) {
    auto& coords = sh->axis == Axis::Row ? next.rows_ : next.cols_;
    const char* what = sh->axis == Axis::Row ? "row" : "column";
    if (sh->index < 0 || sh->index >= static_cast<int>(coords.size())) {
      throw DeviceError("@shuttle", std::string("unknown ") + what,
                        "index " + std::to_string(sh->index));
    }
    const auto idx = static_cast<std::size_t>(sh->index);
    const double target = coords[idx] + sh->offset;
    // Post-move evaluation: the line must neither reorder nor come within
    // Dist_min of its neighbors.
    if (idx > 0) {
      if (target <= coords[idx - 1]) {
        throw DeviceError("@shuttle", std::string(what) + " crossover",
                          std::string(what) + " " + std::to_string(sh->index) +
                              " would move to " + std::to_string(target) +
                              ", past neighbor at " + std::to_string(coords[idx - 1]));
      }
      if (target - coords[idx - 1] < spec.min_trap_distance - kEps) {
        throw DeviceError("@shuttle", std::string(what) + " spacing",
                          std::to_string(target - coords[idx - 1]) +
                              " um to lower neighbor");
      }
    }
    if (idx + 1 < coords.size()) {
      if (target >= coords[idx + 1]) {
        throw DeviceError("@shuttle", std::string(what) + " crossover",
                          std::string(what) + " " + std::to_string(sh->index) +
                              " would move to " + std::to_string(target) +
                              ", past neighbor at " + std::to_string(coords[idx + 1]));
      }
      if (coords[idx + 1] - target < spec.min_trap_distance - kEps) {
        throw DeviceError("@shuttle", std::string(what) + " spacing",
                          std::to_string(coords[idx + 1] - target) +
                              " um to upper neighbor");
      }
    }
    coords[idx] = target;
    if (sh->offset != 0) {
      next.checkAtomSpacing(spec, "@shuttle");
    }
    return next;
  }

  if (const auto* rl = std::get_if<RamanLocal>(&instr)) {
    if (state.bindings_.count(rl->qubit) == 0) {
      throw DeviceError("@raman local", "unknown qubit",
                        "q" + std::to_string(rl->qubit) + " is not bound");
    }
    return next; // geometry unchanged
  }

  if (std::holds_alternative<RamanGlobal>(instr) ||
      std::holds_alternative<Rydberg>(instr)) {
    return next; // geometry unchanged
  }

  throw std::logic_error("unhandled instruction");
}

/// Connected components of the interaction graph at Rydberg range.
/// Singletons are omitted; components and their members are sorted by
/// qubit id.
inline std::vector<std::vector<int>> rydbergComponents(const FpqaState& state,
                                                       const DeviceSpec& spec) {
  const auto atoms = state.occupiedPositions();
  const std::size_t n = atoms.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) {
    parent[i] = i;
  }
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(atoms[i].second, atoms[j].second) <=
          spec.rydberg_distance + 1e-9) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::vector<int>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    groups[find(i)].push_back(atoms[i].first);
  }
  std::vector<std::vector<int>> components;
  for (auto& [root, members] : groups) {
    if (members.size() < 2) {
      continue;
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  std::sort(components.begin(), components.end());
  return components;
}

inline double instructionTime(const FpqaInstruction& instr, const DeviceSpec& spec) {
  struct Visitor {
    const DeviceSpec& spec;
    double operator()(const SlmInit&) const { return 0; }
    double operator()(const AodInit&) const { return 0; }
    double operator()(const Bind&) const { return 0; }
    double operator()(const Transfer&) const { return spec.durations.transfer; }
    double operator()(const Shuttle& s) const {
      return std::abs(s.offset) / spec.move_speed;
    }
    double operator()(const RamanLocal&) const { return spec.durations.raman_local; }
    double operator()(const RamanGlobal&) const {
      return spec.durations.raman_global;
    }
    double operator()(const Rydberg&) const { return spec.durations.rydberg; }
  };
  return std::visit(Visitor{spec}, instr);
}

} // namespace weaver
