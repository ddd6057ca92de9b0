#pragma once

#include "dofoc/order_distribution.hpp"
#include "dofoc/solver_config.hpp"
#include "dofoc/time_grid.hpp"

#include <functional>

namespace dofoc {

/// f(t, x, u).
using StateRhs = std::function<Vector(double, const Vector&, const Vector&)>;
/// dH/dx (t, x, u, lambda).
using AdjointRhs = std::function<Vector(double, const Vector&, const Vector&, const Vector&)>;

/// C-D^psi_{a+} x = f(t, x, u), x(a) = x0.
struct ForwardProblem {
  StateRhs rhs;
  Trajectory control;
  Vector x0;
  OrderDistribution dist;
  TimeGrid grid;
};

/// D^psi_{b-} lambda = dH/dx(t, x, u, lambda), lambda(b) = 0.
struct AdjointProblem {
  AdjointRhs rhs;
  Trajectory state;
  Trajectory control;
  OrderDistribution dist;
  TimeGrid grid;
};

struct AdjointSolution {
  Trajectory adjoint;
  /// |I^{1-psi}_{b-} lambda| at the node next to b, the discrete one-sided
  /// limit of the transversality quantity.
  double transversality_residual = 0.0;
};

/// Multi-term L1 scheme, one implicit step per node solved by fixed-point
/// iteration (damped by 0.5 after 20 iterations). A step is accepted once the
/// discrete residual is below newton_tol * max(1, |f|).
///
/// Throws SolverDivergenceError (with the step index) when the iteration does
/// not converge in max_inner_iters and DynamicsEvaluationError on NaN/Inf.
Trajectory solve_forward(const ForwardProblem& p, const SolverConfig& cfg);

/// Marches the adjoint from t = b. Under s = a + b - t the right RL operator
/// becomes a left one, and with lambda(b) = 0 the RL derivative of the
/// piecewise-linear interpolant coincides with its L1 Caputo derivative, so the
/// forward stepping kernel is reused on the reversed problem.
AdjointSolution solve_adjoint(const AdjointProblem& p, const SolverConfig& cfg);

/// Max-norm over nodes i >= 1 of distributed_caputo_left(x) - f(t, x, u),
/// evaluated through the operator module rather than the stepping code.
double residual_forward(const Trajectory& x, const ForwardProblem& p);

}  // namespace dofoc
