#pragma once

#include "dofoc/control_problem.hpp"

#include <string>
#include <vector>

namespace dofoc::cli {

/// Names accepted by the "builtin" key of a problem file.
const std::vector<std::string>& builtin_problem_names();

/// Built-in problem, with psi discretized by quad_order Gauss points.
/// Throws SpecError (reason "builtin") for an unknown name.
///
///   paper_example_sec4  max int_1^5 (1 - 3u) x dt,  D^psi x = u x, x(1) = 1,
///                       psi(alpha) = alpha / 3, u in [0, 2]
///   zero_dynamics       max int_0^1 -u^2 dt,  D x = 0, x(0) = 1, u in [-1, 1]
///   classical_limit_lq  max int_0^1 -(x^2 + u^2)/2 dt,  D^psi x = x/2 + u,
///                       x(0) = 1, psi a narrow bump at alpha = 1, u in [-10, 10]
ControlProblem builtin_problem(const std::string& name, int quad_order);

struct DynamicsMaps {
  DynamicsFn f;
  JacobianFn f_x;
  bool affine_in_u;
};

struct CostMaps {
  CostFn L;
  CostGradientFn L_x;
  bool affine_in_u;
};

/// Named dynamics: "zero" (f = 0) and "bilinear" (f_i = u_i x_i, needs n = m).
DynamicsMaps builtin_dynamics(const std::string& name, int state_dim, int control_dim);

/// Named running costs: "harvest" (L = sum_i (1 - 3 u_i) x_i, needs n = m) and
/// "control_energy" (L = -|u|^2).
CostMaps builtin_cost(const std::string& name, int state_dim, int control_dim);

}  // namespace dofoc::cli
