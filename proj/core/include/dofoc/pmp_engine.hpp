#pragma once

#include "dofoc/control_problem.hpp"
#include "dofoc/dofde_solvers.hpp"
#include "dofoc/solver_config.hpp"

#include <vector>

namespace dofoc {

/// Converged (or best) state/control/adjoint triple with diagnostics.
struct PMPSolution {
  Trajectory state;
  Trajectory control;
  Trajectory adjoint;
  double cost_value = 0.0;
  int sweep_iterations = 0;
  bool converged = false;
  /// Max over nodes of [max_{w in check grid} H(w) - H(u*)] / max(1, |H(u*)|).
  double hamiltonian_residual = 0.0;
  double transversality_residual = 0.0;
  /// Max-norm of u_new - u at the last sweep.
  double final_control_change = 0.0;
  double final_gamma = 0.0;
};

/// H(t, x, u, lambda) = L(t, x, u) + lambda . f(t, x, u).
double hamiltonian(const ControlProblem& prob, double t, const Vector& x, const Vector& u,
                   const Vector& lam);

/// dH/dx = dL/dx + (df/dx)^T lambda.
Vector hamiltonian_dx(const ControlProblem& prob, double t, const Vector& x, const Vector& u,
                      const Vector& lam);

/// argmax_{w in omega} H(t, x, w, lambda).
///
/// Control-affine problems get the bang-bang answer per component: hi when the
/// switching coefficient is positive, lo otherwise (lo on an exact zero).
/// Other problems are scanned on control_grid points per dimension and the best
/// point is refined by golden-section search along each coordinate.
Vector maximize_hamiltonian(const ControlProblem& prob, double t, const Vector& x,
                            const Vector& lam, const SolverConfig& cfg);

/// Trapezoid rule for J = int L(t, x, u) dt.
double cost_functional(const ControlProblem& prob, const Trajectory& x, const Trajectory& u);

/// Forward solve of the state for a given control.
Trajectory solve_state(const ControlProblem& prob, const Trajectory& u, const SolverConfig& cfg);

/// Adjoint solve for a given state/control pair.
AdjointSolution solve_costate(const ControlProblem& prob, const Trajectory& x,
                              const Trajectory& u, const SolverConfig& cfg);

/// Maximality gap of a triple, see PMPSolution::hamiltonian_residual.
double hamiltonian_residual(const ControlProblem& prob, const Trajectory& x, const Trajectory& u,
                            const Trajectory& lam, const SolverConfig& cfg);

/// Control values checked by hamiltonian_residual: a tensor grid with
/// control_grid points per dimension.
std::vector<Vector> control_check_grid(const ControlBox& box, int points_per_dim);

/// Forward-backward sweep:
///   x = forward(u), lambda = adjoint(x, u), u_new = argmax H,
///   u <- (1 - gamma) u + gamma u_new,
/// until max |u_new - u| < sweep_tol. Gamma is halved after two consecutive
/// sweeps on which J decreased and |u_new - u| did not shrink. On convergence the control is replaced by the last
/// argmax and state, adjoint and cost are recomputed for it. Without
/// convergence the best iterate (largest J) is returned with converged = false.
PMPSolution solve_pmp(const ControlProblem& prob, const SolverConfig& cfg);

/// Bang-bang switches of one control component: nodes where the value jumps
/// from one bound of the box to the other (both within tol of a bound). Each
/// entry is the time of the first node carrying the new value.
std::vector<double> switch_times(const Trajectory& u, const ControlBox& box, int component,
                                 double tol = 1e-9);

}  // namespace dofoc
