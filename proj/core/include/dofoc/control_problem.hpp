#pragma once

#include "dofoc/order_distribution.hpp"
#include "dofoc/time_grid.hpp"

#include <functional>
#include <optional>
#include <string>

namespace dofoc {

using DynamicsFn = std::function<Vector(double, const Vector&, const Vector&)>;
using JacobianFn = std::function<Matrix(double, const Vector&, const Vector&)>;
using CostFn = std::function<double(double, const Vector&, const Vector&)>;
using CostGradientFn = std::function<Vector(double, const Vector&, const Vector&)>;

/// Closed box lo <= u <= hi, componentwise.
struct ControlBox {
  Vector lo;
  Vector hi;

  int dim() const noexcept { return static_cast<int>(lo.size()); }
  bool contains(const Vector& u, double tol = 0.0) const;
  Vector clamp(const Vector& u) const;
  Vector midpoint() const { return 0.5 * (lo + hi); }
};

/// Maximize int_a^b L(t, x, u) dt subject to C-D^psi_{a+} x = f(t, x, u),
/// x(a) = x0, u(t) in omega.
struct ControlProblem {
  std::string name;
  int state_dim = 1;
  int control_dim = 1;
  DynamicsFn dynamics;
  /// Optional; central differences are used when empty.
  JacobianFn dynamics_dx;
  CostFn cost;
  /// Optional; central differences are used when empty.
  CostGradientFn cost_dx;
  ControlBox omega;
  Vector x0;
  double a = 0.0;
  double b = 1.0;
  OrderDistribution dist;
  /// H is affine in u, so the maximizer is bang-bang per component.
  bool control_affine = false;
  /// Starting control of the sweep; the midpoint of omega when empty.
  std::optional<Vector> initial_control;

  /// Throws ValidationError on inconsistent dimensions, lo > hi, a >= b or
  /// missing maps.
  void validate() const;

  bool derivatives_approximate() const noexcept { return !dynamics_dx || !cost_dx; }

  /// f(t, x, u), checked for finiteness.
  Vector eval_dynamics(double t, const Vector& x, const Vector& u) const;
  double eval_cost(double t, const Vector& x, const Vector& u) const;
  /// df/dx, analytic when provided, else central differences.
  Matrix eval_dynamics_dx(double t, const Vector& x, const Vector& u) const;
  Vector eval_cost_dx(double t, const Vector& x, const Vector& u) const;
};

/// Central-difference step used for missing Jacobians, relative to max(1, |x_k|).
inline constexpr double kFiniteDifferenceStep = 1e-6;

}  // namespace dofoc
