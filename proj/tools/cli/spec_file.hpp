#pragma once

#include "dofoc/control_problem.hpp"
#include "dofoc/sensitivity.hpp"
#include "dofoc/solver_config.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dofoc::cli {

/// Malformed or inconsistent problem file. reason() is a short keyword naming
/// the offending section (horizon, psi, omega, ...).
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string reason, const std::string& detail)
      : std::runtime_error(detail), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

/// Command-line replacements for fields of the solver section.
struct ConfigOverrides {
  std::optional<int> n_steps;
  std::optional<int> quad_order;
  std::optional<double> sweep_tol;
  std::optional<double> newton_tol;
  std::optional<int> max_inner_iters;
  std::optional<int> max_sweeps;
  std::optional<int> control_grid;
  std::optional<double> needle_tol;
  std::optional<double> gamma;
};

struct ProblemSpec {
  ControlProblem problem;
  SolverConfig config;
  /// Solver fields that kept their built-in default.
  std::vector<std::string> defaults_used;
  /// User-supplied K and M for the continuity bound.
  std::optional<LipschitzBounds> bounds;
  /// The parsed document, echoed into reports.
  nlohmann::json document;
};

/// Parses a problem file (JSON, comments allowed). Unknown keys are errors.
ProblemSpec parse_problem_spec(const nlohmann::json& doc, const ConfigOverrides& overrides = {});
ProblemSpec load_problem_spec(const std::string& path, const ConfigOverrides& overrides = {});

/// SolverConfig as a JSON object.
nlohmann::json config_to_json(const SolverConfig& cfg);

}  // namespace dofoc::cli
