#pragma once

namespace dofoc {

/// Discretization and iteration controls shared by every solver.
struct SolverConfig {
  int n_steps = 2000;
  int quad_order = 20;
  double sweep_tol = 1e-6;
  /// Relative tolerance of the implicit step iteration.
  double newton_tol = 1e-10;
  int max_inner_iters = 200;
  int max_sweeps = 500;
  /// Points per control dimension for grid scans and the maximality check.
  int control_grid = 101;
  double needle_tol = 1e-3;
  /// Sweep relaxation u <- (1 - gamma) u + gamma u_new.
  double gamma = 0.5;

  /// Throws ValidationError unless every field is positive and n_steps >= 2.
  void validate() const;
};

}  // namespace dofoc
