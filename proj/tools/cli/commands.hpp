#pragma once

#include "cli/spec_file.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dofoc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,
  kExitSolver = 2,
  kExitNotConverged = 3,
  kExitFail = 4,
};

struct SolveOptions {
  std::string spec_path;
  std::string out_dir;
  ConfigOverrides overrides;
};

struct ValidateOptions {
  std::string spec_path;
  std::string sol_dir;
  int needles = 16;
  std::uint64_t seed = 1;
  ConfigOverrides overrides;
};

struct ProbeOptions {
  std::string spec_path;
  /// continuity, variational or operators.
  std::string kind;
  std::optional<double> tau;
  std::optional<std::vector<double>> v;
  std::optional<std::vector<double>> ladder;
  /// Comparison interval of the variational probe.
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<std::string> out_path;
  ConfigOverrides overrides;
};

/// Writes state.csv, control.csv, adjoint.csv and report.json into out_dir.
int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);

/// Needle test of the control stored in sol_dir; writes validation.json there.
int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err);

/// Prints a JSON report for the requested diagnostic.
int cmd_probe(const ProbeOptions& opts, std::ostream& out, std::ostream& err);

/// Seeded needle draws: tau uniform over the nodes with index >= 8 (excluding
/// b), v uniform in omega, theta uniform in [4h, (tau - a)/2].
std::vector<NeedleSpec> draw_needle_specs(const TimeGrid& grid, const ControlBox& omega, int count,
                                          std::uint64_t seed);

}  // namespace dofoc::cli
