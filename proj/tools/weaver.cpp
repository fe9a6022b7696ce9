// weaver: compile MAX-3SAT instances to annotated FPQA pulse programs,
// verify them, and benchmark whole corpora.
//
// Exit codes:
//   compile: 0 ok, 1 input parse error, 2 device capacity exceeded,
//            3 internal error
//   check:   0 equivalent, 4 structurally equivalent only, 5 mismatch,
//            1 parse or validation error
//   bench:   0 (per-instance failures are recorded in the CSV)

#include "weaver/checker.hpp"
#include "weaver/config.hpp"
#include "weaver/formula.hpp"
#include "weaver/metrics.hpp"
#include "weaver/optimizer.hpp"
#include "weaver/qaoa.hpp"
#include "weaver/wqasm.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

weaver::DeviceSpec resolveDeviceSpec(const std::string& flagPath, bool quiet) {
  std::string path = flagPath;
  if (path.empty()) {
    if (const char* env = std::getenv("WEAVER_DEVICE_CONFIG")) {
      path = env;
    }
  }
  if (path.empty()) {
    if (!quiet) {
      std::cerr << "warning: no device config given (--device or "
                   "WEAVER_DEVICE_CONFIG); using built-in defaults\n";
    }
    return weaver::DeviceSpec{};
  }
  return weaver::loadDeviceSpec(path);
}

struct CompileOptions {
  std::string input;
  std::string device;
  std::string out;
  std::string reportPath;
  double gamma = weaver::QaoaParams{}.gamma;
  double beta = weaver::QaoaParams{}.beta;
  int layers = 1;
  bool noCompress = false;
};

int runCompile(const CompileOptions& opt) {
  weaver::DeviceSpec spec;
  weaver::SatFormula formula;
  try {
    spec = resolveDeviceSpec(opt.device, false);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    std::ifstream in(opt.input);
    if (!in) {
      std::cerr << "error: cannot open " << opt.input << '\n';
      return 1;
    }
    formula = weaver::parseDimacs(in);
  } catch (const weaver::ParseError& e) {
    std::cerr << "error: " << opt.input << ": " << e.what() << '\n';
    return 1;
  }

  weaver::QaoaParams params;
  params.gamma = opt.gamma;
  params.beta = opt.beta;
  params.layers = opt.layers;
  const auto mode = opt.noCompress ? weaver::CompressionMode::Never
                                   : weaver::CompressionMode::Auto;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = weaver::compile(formula, params, spec, mode);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    std::string outPath = opt.out;
    if (outPath.empty()) {
      outPath = fs::path(opt.input).replace_extension(".wqasm").string();
    }
    std::ofstream out(outPath);
    if (!out) {
      std::cerr << "error: cannot write " << outPath << '\n';
      return 3;
    }
    weaver::emit(result.wqasm, out);

    const auto report = weaver::makeReport(
        result, formula, params, spec, fs::path(opt.input).filename().string(),
        seconds);
    if (!opt.reportPath.empty()) {
      std::ofstream rep(opt.reportPath);
      if (!rep) {
        std::cerr << "error: cannot write " << opt.reportPath << '\n';
        return 3;
      }
      rep << report.toJson().dump(2) << '\n';
    }
    std::cout << "compiled " << opt.input << ": " << report.numVariables
              << " vars, " << report.numClauses << " clauses, "
              << report.numColors << " colors, variant " << report.variant
              << "\n  wrote " << outPath << "\n  compile " << seconds
              << " s, execution " << report.timelineDuration << " s, eps "
              << report.eps << ", cz " << report.czCount << ", ccz "
              << report.cczCount << ", ccz threshold " << report.cczThreshold
              << '\n';
    return 0;
  } catch (const weaver::CompileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind == weaver::CompileError::Kind::Capacity ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

struct CheckOptions {
  std::string input;
  std::string device;
  std::string reportPath;
  int maxUnitaryQubits = 10;
};

int runCheck(const CheckOptions& opt) {
  weaver::DeviceSpec spec;
  weaver::WqasmProgram program;
  try {
    spec = resolveDeviceSpec(opt.device, false);
    std::ifstream in(opt.input);
    if (!in) {
      std::cerr << "error: cannot open " << opt.input << '\n';
      return 1;
    }
    program = weaver::parseWqasm(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  const auto report = weaver::checkProgram(program, spec, opt.maxUnitaryQubits);
  if (!opt.reportPath.empty()) {
    std::ofstream rep(opt.reportPath);
    if (rep) {
      rep << report.toJson().dump(2) << '\n';
    }
  }
  switch (report.verdict) {
  case weaver::Verdict::Equivalent:
    std::cout << "equivalent: annotations realize the declared circuit ("
              << report.gateStatements << " gates)\n";
    return 0;
  case weaver::Verdict::StructurallyEquivalentOnly:
    std::cout << "structurally-equivalent-only: " << report.numQubits
              << " qubits exceed the unitary limit ("
              << opt.maxUnitaryQubits
              << "); only the commutation-aware structural check passed\n";
    return 4;
  case weaver::Verdict::Mismatch:
    std::cout << report.toJson().dump(2) << '\n';
    return 5;
  }
  return 5;
}

struct BenchOptions {
  std::string dir;
  std::string device;
  std::string out = "results.csv";
  double timeoutSeconds = 72000;
  double gamma = weaver::QaoaParams{}.gamma;
  double beta = weaver::QaoaParams{}.beta;
  int layers = 1;
  bool noCompress = false;
};

int runBench(const BenchOptions& opt) {
  weaver::DeviceSpec spec;
  try {
    spec = resolveDeviceSpec(opt.device, false);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  weaver::QaoaParams params;
  params.gamma = opt.gamma;
  params.beta = opt.beta;
  params.layers = opt.layers;
  const auto mode = opt.noCompress ? weaver::CompressionMode::Never
                                   : weaver::CompressionMode::Auto;

  std::vector<fs::path> files;
  if (fs::exists(opt.dir)) {
    for (const auto& entry : fs::directory_iterator(opt.dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".cnf") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  std::ofstream csv(opt.out);
  if (!csv) {
    std::cerr << "error: cannot write " << opt.out << '\n';
    return 1;
  }
  csv << weaver::csvHeader() << '\n';

  const auto benchStart = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         benchStart)
        .count();
  };

  // Group rows by instance size so a mean row can follow each group.
  std::vector<weaver::CompilationReport> group;
  int groupSize = -1;
  auto flushGroup = [&] {
    if (group.size() > 1) {
      csv << weaver::csvMeanRow(group) << '\n';
    }
    group.clear();
  };

  for (const auto& file : files) {
    if (elapsed() > opt.timeoutSeconds) {
      std::cerr << "warning: bench timeout reached, skipping remaining "
                   "instances starting at "
                << file.filename().string() << '\n';
      break;
    }
    weaver::SatFormula formula;
    try {
      std::ifstream in(file);
      formula = weaver::parseDimacs(in);
    } catch (const std::exception& e) {
      std::cerr << "warning: " << file.filename().string() << ": " << e.what()
                << '\n';
      csv << "0,error,0,0,0,0,0,0,0\n";
      continue;
    }
    if (formula.numVariables() != groupSize) {
      flushGroup();
      groupSize = formula.numVariables();
    }
    try {
      const auto t0 = std::chrono::steady_clock::now();
      auto result = weaver::compile(formula, params, spec, mode);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      const auto report =
          weaver::makeReport(result, formula, params, spec,
                             file.filename().string(), seconds);
      csv << weaver::csvRow(report) << '\n';
      group.push_back(report);
      std::cout << file.filename().string() << ": " << weaver::csvRow(report)
                << '\n';
    } catch (const std::exception& e) {
      std::cerr << "warning: " << file.filename().string() << ": " << e.what()
                << '\n';
      csv << formula.numVariables() << ",error,0,0,0,0,0,0,0\n";
    }
  }
  flushGroup();
  std::cout << "wrote " << opt.out << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"retargetable FPQA compiler for MAX-3SAT QAOA"};
  app.require_subcommand(1);

  CompileOptions compileOpt;
  auto* compileCmd =
      app.add_subcommand("compile", "compile a DIMACS instance to wQasm");
  compileCmd->add_option("input", compileOpt.input, "DIMACS .cnf file")
      ->required();
  compileCmd->add_option("--device", compileOpt.device, "device config JSON");
  compileCmd->add_option("--out", compileOpt.out,
                         "output .wqasm path (default: input with .wqasm)");
  compileCmd->add_option("--report", compileOpt.reportPath,
                         "write a JSON compilation report");
  compileCmd->add_option("--gamma", compileOpt.gamma, "QAOA cost angle");
  compileCmd->add_option("--beta", compileOpt.beta, "QAOA mixer angle");
  compileCmd->add_option("--layers", compileOpt.layers, "QAOA layer count")
      ->check(CLI::PositiveNumber);
  compileCmd->add_flag("--no-compress", compileOpt.noCompress,
                       "always use the term-ladder realization");

  CheckOptions checkOpt;
  auto* checkCmd =
      app.add_subcommand("check", "verify an annotated wQasm program");
  checkCmd->add_option("input", checkOpt.input, "wQasm file")->required();
  checkCmd->add_option("--device", checkOpt.device, "device config JSON");
  checkCmd->add_option("--report", checkOpt.reportPath,
                       "write a JSON verdict report");
  checkCmd->add_option("--max-unitary-qubits", checkOpt.maxUnitaryQubits,
                       "largest size checked by dense unitaries");

  BenchOptions benchOpt;
  auto* benchCmd =
      app.add_subcommand("bench", "compile every .cnf in a directory");
  benchCmd->add_option("dir", benchOpt.dir, "corpus directory")->required();
  benchCmd->add_option("--device", benchOpt.device, "device config JSON");
  benchCmd->add_option("--out", benchOpt.out, "CSV output path");
  benchCmd->add_option("--timeout", benchOpt.timeoutSeconds,
                       "overall time budget in seconds");
  benchCmd->add_option("--gamma", benchOpt.gamma, "QAOA cost angle");
  benchCmd->add_option("--beta", benchOpt.beta, "QAOA mixer angle");
  benchCmd->add_option("--layers", benchOpt.layers, "QAOA layer count")
      ->check(CLI::PositiveNumber);
  benchCmd->add_flag("--no-compress", benchOpt.noCompress,
                     "always use the term-ladder realization");

  std::string configDevice;
  std::string configOut;
  auto* configCmd =
      app.add_subcommand("config", "print the effective device config");
  configCmd->add_option("--device", configDevice, "device config JSON");
  configCmd->add_option("--out", configOut, "write instead of printing");

  CLI11_PARSE(app, argc, argv);

  if (compileCmd->parsed()) {
    return runCompile(compileOpt);
  }
  if (checkCmd->parsed()) {
    return runCheck(checkOpt);
  }
  if (benchCmd->parsed()) {
    return runBench(benchOpt);
  }
  if (configCmd->parsed()) {
    try {
      const auto spec = resolveDeviceSpec(configDevice, true);
      if (configOut.empty()) {
        std::cout << weaver::toJson(spec).dump(2) << '\n';
      } else {
        weaver::saveDeviceSpec(spec, configOut);
        std::cout << "wrote " << configOut << '\n';
      }
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}
