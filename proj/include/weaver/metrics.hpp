#pragma once

#include "weaver/config.hpp"
#include "weaver/device.hpp"
#include "weaver/optimizer.hpp"
#include "weaver/qaoa.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace weaver {

/// Wall-clock model of the pulse schedule: steps sharing a parallel
/// group run concurrently, so a maximal run of equal group ids costs
/// the maximum of its instruction times, and the timeline is the sum
/// over runs.
inline double executionTime(const PulseProgram& program,
                            const DeviceSpec& spec) {
  double total = 0;
  std::size_t i = 0;
  while (i < program.steps.size()) {
    const int group = program.steps[i].parallelGroup;
    double slowest = 0;
    while (i < program.steps.size() && program.steps[i].parallelGroup == group) {
      slowest = std::max(slowest,
                         instructionTime(program.steps[i].instruction, spec));
      ++i;
    }
    total += slowest;
  }
  return total;
}

/// Estimated probability of success: the product of per-operation
/// fidelities (each realized CZ, CCZ and single-qubit rotation, each
/// transfer and each shuttle), optionally damped by exp(-T / T2) when
/// the device config sets a nonzero coherence_time.
inline double estimatedSuccessProbability(const PulseProgram& program,
                                          const DeviceSpec& spec) {
  double logEps = 0;
  for (const auto& step : program.steps) {
    if (std::holds_alternative<Transfer>(step.instruction)) {
      logEps += std::log(spec.fidelities.f_transfer);
    } else if (std::holds_alternative<Shuttle>(step.instruction)) {
      logEps += std::log(spec.fidelities.f_move);
    }
    for (const auto& gate : step.realized) {
      switch (gate.kind) {
      case GateKind::CZ:
        logEps += std::log(spec.fidelities.f_cz);
        break;
      case GateKind::CCZ:
        logEps += std::log(spec.fidelities.f_ccz);
        break;
      default:
        logEps += std::log(spec.fidelities.f_1q);
        break;
      }
    }
  }
  if (spec.coherence_time > 0) {
    logEps -= executionTime(program, spec) / spec.coherence_time;
  }
  return std::exp(logEps);
}

struct CompilationReport {
  static constexpr int kSchemaVersion = 1;

  std::string instance;
  std::string variant; // "compressed", "ladder", "mixed"
  int numVariables = 0;
  int numClauses = 0;
  int numColors = 0;
  std::map<std::string, int> pulseCounts; // per instruction mnemonic
  int czCount = 0;
  int cczCount = 0;
  int shuttleTrips = 0;
  double cczThreshold = 0;
  double timelineDuration = 0; // seconds
  double eps = 0;
  double compileSeconds = 0;
  std::string configFingerprint;

  [[nodiscard]] nlohmann::json toJson() const {
    return {{"schema_version", kSchemaVersion},
            {"instance", instance},
            {"variant", variant},
            {"num_variables", numVariables},
            {"num_clauses", numClauses},
            {"num_colors", numColors},
            {"pulse_counts", pulseCounts},
            {"multiqubit_gate_counts", {{"cz", czCount}, {"ccz", cczCount}}},
            {"shuttle_trips", shuttleTrips},
            {"ccz_threshold", cczThreshold},
            {"execution_time_s", timelineDuration},
            {"eps", eps},
            {"compile_time_s", compileSeconds},
            {"config_fingerprint", configFingerprint}};
  }
};

/// Stable fingerprint of the effective device + algorithm parameters so
/// result rows can be traced back to their configuration.
inline std::string configFingerprint(const DeviceSpec& spec,
                                     const QaoaParams& params) {
  nlohmann::json j = toJson(spec);
  j["qaoa"] = {{"gamma", params.gamma}, {"beta", params.beta},
               {"layers", params.layers}};
  const std::size_t h = std::hash<std::string>{}(j.dump());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016zx", h);
  return buf;
}

inline CompilationReport makeReport(const CompileResult& result,
                                    const SatFormula& formula,
                                    const QaoaParams& params,
                                    const DeviceSpec& spec,
                                    const std::string& instance,
                                    double compileSeconds) {
  CompilationReport report;
  report.instance = instance;
  report.numVariables = formula.numVariables();
  report.numClauses = static_cast<int>(formula.numClauses());
  report.numColors = result.coloring.numColors;
  bool anyCompressed = false;
  bool anyLadder = false;
  for (const bool c : result.clauseCompressed) {
    anyCompressed = anyCompressed || c;
    anyLadder = anyLadder || !c;
  }
  report.variant = anyCompressed && anyLadder ? "mixed"
                   : anyCompressed            ? "compressed"
                   : anyLadder                ? "ladder"
                                              : "empty";
  for (const auto& step : result.program.steps) {
    ++report.pulseCounts[instructionName(step.instruction)];
    for (const auto& gate : step.realized) {
      report.czCount += gate.kind == GateKind::CZ ? 1 : 0;
      report.cczCount += gate.kind == GateKind::CCZ ? 1 : 0;
    }
  }
  report.shuttleTrips = result.shuttleTrips;
  report.cczThreshold = result.cczThreshold;
  report.timelineDuration = executionTime(result.program, spec);
  report.eps = estimatedSuccessProbability(result.program, spec);
  report.compileSeconds = compileSeconds;
  report.configFingerprint = configFingerprint(spec, params);
  return report;
}

// ---------------------------------------------------------------------------
// CSV aggregation
// ---------------------------------------------------------------------------

inline std::string csvHeader() {
  return "size,variant,compile_s,exec_s,eps,pulses,cz,ccz,colors";
}

inline int totalPulses(const CompilationReport& report) {
  int pulses = 0;
  for (const char* name : {"@raman local", "@raman global", "@rydberg"}) {
    const auto it = report.pulseCounts.find(name);
    pulses += it == report.pulseCounts.end() ? 0 : it->second;
  }
  return pulses;
}

inline std::string csvRow(const CompilationReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.9f,%.9g,%d,%d,%d,%d",
                report.numVariables, report.variant.c_str(),
                report.compileSeconds, report.timelineDuration, report.eps,
                totalPulses(report), report.czCount, report.cczCount,
                report.numColors);
  return buf;
}

/// Mean row over a group of reports of equal size, as appended by the
/// bench driver after each size group.
inline std::string csvMeanRow(const std::vector<CompilationReport>& group) {
  if (group.empty()) {
    return {};
  }
  double compile = 0;
  double exec = 0;
  double logEps = 0;
  double pulses = 0;
  double cz = 0;
  double ccz = 0;
  double colors = 0;
  for (const auto& r : group) {
    compile += r.compileSeconds;
    exec += r.timelineDuration;
    logEps += std::log(std::max(r.eps, 1e-300));
    pulses += totalPulses(r);
    cz += r.czCount;
    ccz += r.cczCount;
    colors += r.numColors;
  }
  const double n = static_cast<double>(group.size());
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,mean,%.6f,%.9f,%.9g,%d,%d,%d,%d",
                group.front().numVariables, compile / n, exec / n,
                std::exp(logEps / n), static_cast<int>(pulses / n + 0.5),
                static_cast<int>(cz / n + 0.5), static_cast<int>(ccz / n + 0.5),
                static_cast<int>(colors / n + 0.5));
  return buf;
}

} // namespace weaver
