#include "cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_overrides(CLI::App* cmd, dofoc::cli::ConfigOverrides& o) {
  cmd->add_option("--n-steps", o.n_steps, "Time steps");
  cmd->add_option("--quad-order", o.quad_order, "Gauss points for the order distribution");
  cmd->add_option("--sweep-tol", o.sweep_tol, "Sweep stopping tolerance");
  cmd->add_option("--newton-tol", o.newton_tol, "Relative tolerance of the implicit step");
  cmd->add_option("--max-inner-iters", o.max_inner_iters, "Iterations per implicit step");
  cmd->add_option("--max-sweeps", o.max_sweeps, "Forward-backward sweeps");
  cmd->add_option("--control-grid", o.control_grid, "Control points per dimension");
  cmd->add_option("--needle-tol", o.needle_tol, "Needle test tolerance");
  cmd->add_option("--gamma", o.gamma, "Sweep relaxation");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control with distributed-order fractional dynamics"};
  app.require_subcommand(1);

  dofoc::cli::SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem and write traces");
  solve_cmd->add_option("spec", solve.spec_path, "Problem file")->required();
  solve_cmd->add_option("--out", solve.out_dir, "Output directory")->required();
  add_overrides(solve_cmd, solve.overrides);

  dofoc::cli::ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Needle test of a stored solution");
  validate_cmd->add_option("spec", validate.spec_path, "Problem file")->required();
  validate_cmd->add_option("--sol", validate.sol_dir, "Directory written by solve")->required();
  validate_cmd->add_option("--needles", validate.needles, "Number of random needles")->capture_default_str();
  validate_cmd->add_option("--seed", validate.seed, "Seed of the needle draws")->capture_default_str();
  add_overrides(validate_cmd, validate.overrides);

  dofoc::cli::ProbeOptions probe;
  auto* probe_cmd = app.add_subcommand("probe", "Convergence diagnostics");
  probe_cmd->add_option("spec", probe.spec_path, "Problem file")->required();
  probe_cmd->add_option("--kind", probe.kind, "continuity, variational or operators")->required();
  probe_cmd->add_option("--tau", probe.tau, "Needle end time (default: horizon midpoint)");
  probe_cmd->add_option("--v", probe.v, "Needle value, one entry per control (default: lower bounds)");
  probe_cmd->add_option("--ladder", probe.ladder, "Decreasing needle widths");
  probe_cmd->add_option("--lo", probe.lo, "Start of the variational comparison interval");
  probe_cmd->add_option("--hi", probe.hi, "End of the variational comparison interval");
  probe_cmd->add_option("--report", probe.out_path, "Also write the report to this file");
  add_overrides(probe_cmd, probe.overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(dofoc::cli::kExitParse);
  }

  if (*solve_cmd) return dofoc::cli::cmd_solve(solve, std::cout, std::cerr);
  if (*validate_cmd) return dofoc::cli::cmd_validate(validate, std::cout, std::cerr);
  return dofoc::cli::cmd_probe(probe, std::cout, std::cerr);
}
