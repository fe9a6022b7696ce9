#pragma once

#include "weaver/device.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace weaver {

/// JSON (de)serialization for DeviceSpec. Keys are exactly the struct
/// field names; durations and fidelities are nested objects. Missing
/// keys keep their defaults; unknown keys are rejected to catch typos.

inline nlohmann::json toJson(const DeviceSpec& spec) {
  return nlohmann::json{
      {"min_trap_distance", spec.min_trap_distance},
      {"max_transfer_distance", spec.max_transfer_distance},
      {"rydberg_distance", spec.rydberg_distance},
      {"move_speed", spec.move_speed},
      {"durations",
       {{"raman_local", spec.durations.raman_local},
        {"raman_global", spec.durations.raman_global},
        {"rydberg", spec.durations.rydberg},
        {"transfer", spec.durations.transfer}}},
      {"fidelities",
       {{"f_1q", spec.fidelities.f_1q},
        {"f_cz", spec.fidelities.f_cz},
        {"f_ccz", spec.fidelities.f_ccz},
        {"f_transfer", spec.fidelities.f_transfer},
        {"f_move", spec.fidelities.f_move}}},
      {"equidistance_tolerance", spec.equidistance_tolerance},
      {"isolation_factor", spec.isolation_factor},
      {"triangle_side_factor", spec.triangle_side_factor},
      {"coherence_time", spec.coherence_time},
      {"max_slm_traps", spec.max_slm_traps},
      {"max_aod_columns", spec.max_aod_columns},
      {"max_aod_rows", spec.max_aod_rows},
  };
}

inline DeviceSpec deviceSpecFromJson(const nlohmann::json& j) {
  DeviceSpec spec;
  auto read = [](const nlohmann::json& obj, const char* key, auto& field) {
    if (obj.contains(key)) {
      obj.at(key).get_to(field);
    }
  };
  auto checkKeys = [](const nlohmann::json& obj,
                      std::initializer_list<const char*> known,
                      const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
      bool ok = false;
      for (const char* k : known) {
        ok = ok || key == k;
      }
      if (!ok) {
        throw std::invalid_argument("unknown device config key: " + where + key);
      }
    }
  };
  checkKeys(j,
            {"min_trap_distance", "max_transfer_distance", "rydberg_distance",
             "move_speed", "durations", "fidelities", "equidistance_tolerance",
             "isolation_factor", "triangle_side_factor", "coherence_time",
             "max_slm_traps", "max_aod_columns", "max_aod_rows"},
            "");
  read(j, "min_trap_distance", spec.min_trap_distance);
  read(j, "max_transfer_distance", spec.max_transfer_distance);
  read(j, "rydberg_distance", spec.rydberg_distance);
  read(j, "move_speed", spec.move_speed);
  if (j.contains("durations")) {
    const auto& d = j.at("durations");
    checkKeys(d, {"raman_local", "raman_global", "rydberg", "transfer"},
              "durations.");
    read(d, "raman_local", spec.durations.raman_local);
    read(d, "raman_global", spec.durations.raman_global);
    read(d, "rydberg", spec.durations.rydberg);
    read(d, "transfer", spec.durations.transfer);
  }
  if (j.contains("fidelities")) {
    const auto& f = j.at("fidelities");
    checkKeys(f, {"f_1q", "f_cz", "f_ccz", "f_transfer", "f_move"},
              "fidelities.");
    read(f, "f_1q", spec.fidelities.f_1q);
    read(f, "f_cz", spec.fidelities.f_cz);
    read(f, "f_ccz", spec.fidelities.f_ccz);
    read(f, "f_transfer", spec.fidelities.f_transfer);
    read(f, "f_move", spec.fidelities.f_move);
  }
  read(j, "equidistance_tolerance", spec.equidistance_tolerance);
  read(j, "isolation_factor", spec.isolation_factor);
  read(j, "triangle_side_factor", spec.triangle_side_factor);
  read(j, "coherence_time", spec.coherence_time);
  read(j, "max_slm_traps", spec.max_slm_traps);
  read(j, "max_aod_columns", spec.max_aod_columns);
  read(j, "max_aod_rows", spec.max_aod_rows);
  spec.validate();
  return spec;
}

inline DeviceSpec loadDeviceSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open device config: " + path);
  }
  nlohmann::json j;
  in >> j;
  return deviceSpecFromJson(j);
}

inline void saveDeviceSpec(const DeviceSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write device config: " + path);
  }
  out << toJson(spec).dump(2) << '\n';
}

} // namespace weaver
