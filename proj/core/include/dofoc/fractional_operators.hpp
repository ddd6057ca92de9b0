#pragma once

#include "dofoc/order_distribution.hpp"
#include "dofoc/time_grid.hpp"

#include <vector>

namespace dofoc {

/// Interpolant used inside product-integration rules.
enum class ProductRule {
  PiecewiseConstant,
  PiecewiseLinear,
};

enum class Side { Left, Right };

// Single-order building blocks. Every operator acts componentwise and returns
// samples on the input grid.

/// Left Riemann-Liouville integral (1/Gamma(order)) int_a^t (t-s)^{order-1} f(s) ds
/// by product integration; node 0 is 0. order in (0, 1].
Trajectory rl_integral_left(const Trajectory& f, double order,
                            ProductRule rule = ProductRule::PiecewiseLinear);

/// Right-sided counterpart, computed by time reversal of rl_integral_left.
Trajectory rl_integral_right(const Trajectory& f, double order,
                             ProductRule rule = ProductRule::PiecewiseLinear);

/// L1 approximation of the left Caputo derivative. order in [0, 1]: order 0 is
/// x - x(a), order 1 the classical difference quotient.
Trajectory caputo_derivative_left(const Trajectory& x, double order);
Trajectory caputo_derivative_right(const Trajectory& x, double order);

/// Left RL derivative d/dt I^{1-order}_{a+} x. The part x - x(a) is
/// differentiated on the grid; the x(a) (t - a)^{-order} / Gamma(1 - order)
/// term is exact. Node 0, where that term is singular, holds the regular part.
Trajectory rl_derivative_left(const Trajectory& x, double order);
/// Right RL derivative -d/dt I^{1-order}_{b-} x, the time reversal of the left one.
Trajectory rl_derivative_right(const Trajectory& x, double order);

// Distributed-order operators: sum over the quadrature nodes of dist, ascending
// node index first, then ascending time index.

Trajectory distributed_caputo_left(const Trajectory& x, const OrderDistribution& dist);
Trajectory distributed_caputo_right(const Trajectory& x, const OrderDistribution& dist);
/// Same endpoint treatment as rl_derivative_left, summed over the nodes.
Trajectory distributed_rl_left(const Trajectory& x, const OrderDistribution& dist);
Trajectory distributed_rl_right(const Trajectory& x, const OrderDistribution& dist);

/// int psi(alpha) I^{1-alpha}_{a+} x d alpha.
Trajectory distributed_integral_left(const Trajectory& x, const OrderDistribution& dist);
/// int psi(alpha) I^{1-alpha}_{b-} x d alpha, the quantity in the transversality condition.
Trajectory distributed_integral_right(const Trajectory& x, const OrderDistribution& dist);

/// Max-norm over interior nodes of
///   C-derivative - [RL-derivative - x(endpoint) int psi(alpha) s^{-alpha}/Gamma(1-alpha) d alpha],
/// with s the distance to the endpoint of the chosen side.
double rl_caputo_relation_residual(const Trajectory& x, const OrderDistribution& dist, Side side);

/// |int x . C-derivative_left(y) dt - [y . I_right(x)]_a^b - int y . RL-derivative_right(x) dt|.
///
/// The first integral uses the trapezoid rule. The last one is evaluated in
/// Stieltjes form, sum_i (y_i + y_{i+1})/2 (G_i - G_{i+1}) with G the
/// distributed right integral, which stays accurate when the right derivative
/// of x is singular at b.
double integration_by_parts_residual(const Trajectory& x, const Trajectory& y,
                                     const OrderDistribution& dist);

/// Combined L1 kernel of a distributed-order Caputo derivative on a grid with
/// step h: D x(t_n) = sum_{k<n} kernel[n-1-k] (x_{k+1} - x_k).
std::vector<double> l1_kernel(const OrderDistribution& dist, double h, int n_steps);

/// Single-order L1 kernel, h^{-order}/Gamma(2-order) ((m+1)^{1-order} - m^{1-order}).
std::vector<double> l1_kernel(double order, double h, int n_steps);

}  // namespace dofoc
