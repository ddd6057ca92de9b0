#include "dofoc/fractional_operators.hpp"

#include "dofoc/errors.hpp"
#include "dofoc/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>

namespace dofoc {
namespace {

// (j+1)^p - j^p, without cancellation for large j.
double forward_power_difference(double j, double p) {
  if (j == 0.0) return 1.0;
  return std::pow(j, p) * std::expm1(p * std::log1p(1.0 / j));
}

// (j+1)^p - 2 j^p + (j-1)^p for j >= 1.
double second_power_difference(double j, double p) {
  return std::pow(j, p) * (std::expm1(p * std::log1p(1.0 / j)) + std::expm1(p * std::log1p(-1.0 / j)));
}

// (n-1)^{p} - (n-p) n^{p-1} for n >= 1, written with p = order + 1.
double first_node_weight(double n, double p) {
  return std::pow(n, p) * (std::expm1(p * std::log1p(-1.0 / n)) + p / n);
}

// Multi-term product-integration weights for a left fractional integral:
//   I_n = first[n] f_0 + sum_{k=1}^{n-1} interior[n-k] f_k + last f_n      (linear)
//   I_n = sum_{k=0}^{n-1} interior[n-1-k] f_k                                (constant)
struct ProductKernel {
  ProductRule rule = ProductRule::PiecewiseLinear;
  std::vector<double> first;
  std::vector<double> interior;
  double last = 0.0;

  ProductKernel(ProductRule r, std::size_t n_steps)
      : rule(r), first(n_steps + 1, 0.0), interior(n_steps + 1, 0.0) {}

  void add_order(double order, double coefficient, double h) {
    const std::size_t n_steps = first.size() - 1;
    if (rule == ProductRule::PiecewiseLinear) {
      const double scale = coefficient * std::pow(h, order) * special::reciprocal_gamma(order + 2.0);
      const double p = order + 1.0;
      for (std::size_t n = 1; n <= n_steps; ++n) {
        first[n] += scale * first_node_weight(static_cast<double>(n), p);
        interior[n] += scale * second_power_difference(static_cast<double>(n), p);
      }
      last += scale;
    } else {
      const double scale = coefficient * std::pow(h, order) * special::reciprocal_gamma(order + 1.0);
      for (std::size_t m = 0; m < n_steps; ++m) {
        interior[m] += scale * forward_power_difference(static_cast<double>(m), order);
      }
    }
  }

  Trajectory apply(const Trajectory& f) const {
    Trajectory out(f.grid(), f.dim());
    const std::size_t n_nodes = f.size();
    for (int c = 0; c < f.dim(); ++c) {
      for (std::size_t n = 1; n < n_nodes; ++n) {
        double acc = 0.0;
        if (rule == ProductRule::PiecewiseLinear) {
          acc = first[n] * f(0, c);
          for (std::size_t k = 1; k < n; ++k) acc += interior[n - k] * f(k, c);
          acc += last * f(n, c);
        } else {
          for (std::size_t k = 0; k < n; ++k) acc += interior[n - 1 - k] * f(k, c);
        }
        out(n, c) = acc;
      }
    }
    return out;
  }
};

void check_integral_order(double order, const char* who) {
  if (!(order > 0.0 && order <= 1.0)) {
    std::ostringstream os;
    os << who << ": order " << order << " outside (0, 1]";
    throw DomainError(os.str());
  }
}

void check_derivative_order(double order, const char* who) {
  if (!(order >= 0.0 && order <= 1.0)) {
    std::ostringstream os;
    os << who << ": order " << order << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

Trajectory apply_l1(const std::vector<double>& kernel, const Trajectory& x) {
  Trajectory out(x.grid(), x.dim());
  const std::size_t n_nodes = x.size();
  std::vector<double> dx(n_nodes);
  for (int c = 0; c < x.dim(); ++c) {
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) dx[k] = x(k + 1, c) - x(k, c);
    for (std::size_t n = 1; n < n_nodes; ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += kernel[n - 1 - k] * dx[k];
      out(n, c) = acc;
    }
  }
  return out;
}

// Central differences inside, one-sided at both ends.
Trajectory differentiate(const Trajectory& g) {
  Trajectory out(g.grid(), g.dim());
  const std::size_t n = g.size();
  const double h = g.grid().step();
  for (int c = 0; c < g.dim(); ++c) {
    out(0, c) = (g(1, c) - g(0, c)) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) out(i, c) = (g(i + 1, c) - g(i - 1, c)) / (2.0 * h);
    out(n - 1, c) = (g(n - 1, c) - g(n - 2, c)) / h;
  }
  return out;
}

// Regular part x - x(0) - s (t - a), with s the slope of the first interval,
// differentiated on the grid after the integral; the affine part contributes
// sum_j c_j [x(0) (t - a)^{-alpha_j} / Gamma(1 - alpha_j)
//            + s (t - a)^{1 - alpha_j} / Gamma(2 - alpha_j)] in closed form.
// Node 0, where the first term is singular, holds the regular part only.
template <class Integral>
Trajectory rl_with_endpoint(const Trajectory& x, std::span<const double> orders,
                            std::span<const double> coefficients, Integral integral) {
  const TimeGrid& grid = x.grid();
  const Eigen::RowVectorXd start = x.values().row(0);
  const Eigen::RowVectorXd slope = (x.values().row(1) - start) / grid.step();
  Trajectory regular = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    regular.values().row(static_cast<Eigen::Index>(i)) -= start + slope * (grid[i] - grid.start());
  }
  Trajectory out = differentiate(integral(regular));
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double elapsed = grid[i] - grid.start();
    double value_kernel = 0.0;
    double slope_kernel = 0.0;
    for (std::size_t j = 0; j < orders.size(); ++j) {
      value_kernel += coefficients[j] * std::pow(elapsed, -orders[j]) * special::reciprocal_gamma(1.0 - orders[j]);
      slope_kernel +=
          coefficients[j] * std::pow(elapsed, 1.0 - orders[j]) * special::reciprocal_gamma(2.0 - orders[j]);
    }
    for (int c = 0; c < x.dim(); ++c) out(i, c) += start[c] * value_kernel + slope[c] * slope_kernel;
  }
  return out;
}

}  // namespace

std::vector<double> l1_kernel(double order, double h, int n_steps) {
  check_derivative_order(order, "l1_kernel");
  std::vector<double> kernel(static_cast<std::size_t>(n_steps), 0.0);
  const double scale = std::pow(h, -order) * special::reciprocal_gamma(2.0 - order);
  for (std::size_t m = 0; m < kernel.size(); ++m) {
    kernel[m] = scale * forward_power_difference(static_cast<double>(m), 1.0 - order);
  }
  return kernel;
}

std::vector<double> l1_kernel(const OrderDistribution& dist, double h, int n_steps) {
  std::vector<double> kernel(static_cast<std::size_t>(n_steps), 0.0);
  for (std::size_t j = 0; j < dist.size(); ++j) {
    const double order = dist.nodes()[j];
    const double scale = dist.coefficients()[j] * std::pow(h, -order) * special::reciprocal_gamma(2.0 - order);
    for (std::size_t m = 0; m < kernel.size(); ++m) {
      kernel[m] += scale * forward_power_difference(static_cast<double>(m), 1.0 - order);
    }
  }
  return kernel;
}

Trajectory rl_integral_left(const Trajectory& f, double order, ProductRule rule) {
  check_integral_order(order, "rl_integral_left");
  ProductKernel kernel(rule, static_cast<std::size_t>(f.grid().steps()));
  kernel.add_order(order, 1.0, f.grid().step());
  return kernel.apply(f);
}

Trajectory rl_integral_right(const Trajectory& f, double order, ProductRule rule) {
  check_integral_order(order, "rl_integral_right");
  return rl_integral_left(f.reversed(), order, rule).reversed();
}

Trajectory caputo_derivative_left(const Trajectory& x, double order) {
  check_derivative_order(order, "caputo_derivative_left");
  if (order == 0.0) {
    Trajectory out = x;
    out.values().rowwise() -= x.values().row(0);
    return out;
  }
  if (order == 1.0) {
    Trajectory out(x.grid(), x.dim());
    const double h = x.grid().step();
    for (int c = 0; c < x.dim(); ++c) {
      out(0, c) = (x(1, c) - x(0, c)) / h;
      for (std::size_t n = 1; n < x.size(); ++n) out(n, c) = (x(n, c) - x(n - 1, c)) / h;
    }
    return out;
  }
  return apply_l1(l1_kernel(order, x.grid().step(), x.grid().steps()), x);
}

Trajectory caputo_derivative_right(const Trajectory& x, double order) {
  check_derivative_order(order, "caputo_derivative_right");
  return caputo_derivative_left(x.reversed(), order).reversed();
}

Trajectory rl_derivative_left(const Trajectory& x, double order) {
  check_derivative_order(order, "rl_derivative_left");
  if (order == 0.0) return x;
  if (order == 1.0) return differentiate(x);
  const double one = 1.0;
  return rl_with_endpoint(x, {&order, 1}, {&one, 1}, [order](const Trajectory& y) { return rl_integral_left(y, 1.0 - order); });
}

Trajectory rl_derivative_right(const Trajectory& x, double order) {
  check_derivative_order(order, "rl_derivative_right");
  return rl_derivative_left(x.reversed(), order).reversed();
}

Trajectory distributed_caputo_left(const Trajectory& x, const OrderDistribution& dist) {
  return apply_l1(l1_kernel(dist, x.grid().step(), x.grid().steps()), x);
}

Trajectory distributed_caputo_right(const Trajectory& x, const OrderDistribution& dist) {
  return distributed_caputo_left(x.reversed(), dist).reversed();
}

Trajectory distributed_integral_left(const Trajectory& x, const OrderDistribution& dist) {
  ProductKernel kernel(ProductRule::PiecewiseLinear, static_cast<std::size_t>(x.grid().steps()));
  for (std::size_t j = 0; j < dist.size(); ++j) {
    kernel.add_order(1.0 - dist.nodes()[j], dist.coefficients()[j], x.grid().step());
  }
  return kernel.apply(x);
}

Trajectory distributed_integral_right(const Trajectory& x, const OrderDistribution& dist) {
  return distributed_integral_left(x.reversed(), dist).reversed();
}

Trajectory distributed_rl_left(const Trajectory& x, const OrderDistribution& dist) {
  return rl_with_endpoint(x, dist.nodes(), dist.coefficients(),
                          [&dist](const Trajectory& y) { return distributed_integral_left(y, dist); });
}

Trajectory distributed_rl_right(const Trajectory& x, const OrderDistribution& dist) {
  return distributed_rl_left(x.reversed(), dist).reversed();
}

double rl_caputo_relation_residual(const Trajectory& x, const OrderDistribution& dist, Side side) {
  const bool left = side == Side::Left;
  const Trajectory caputo = left ? distributed_caputo_left(x, dist) : distributed_caputo_right(x, dist);
  const Trajectory rl = left ? distributed_rl_left(x, dist) : distributed_rl_right(x, dist);
  const TimeGrid& grid = x.grid();
  const std::size_t endpoint = left ? 0 : x.size() - 1;

  double residual = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double distance = left ? grid[i] - grid.start() : grid.end() - grid[i];
    double correction = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
      const double alpha = dist.nodes()[j];
      correction += dist.coefficients()[j] * std::pow(distance, -alpha) * special::reciprocal_gamma(1.0 - alpha);
    }
    for (int c = 0; c < x.dim(); ++c) {
      const double diff = caputo(i, c) - (rl(i, c) - x(endpoint, c) * correction);
      residual = std::max(residual, std::abs(diff));
    }
  }
  return residual;
}

double integration_by_parts_residual(const Trajectory& x, const Trajectory& y,
                                     const OrderDistribution& dist) {
  require_same_grid(x, y, "integration_by_parts_residual");
  if (x.dim() != y.dim()) throw ValidationError("integration_by_parts_residual: dimension mismatch");

  const Trajectory caputo_y = distributed_caputo_left(y, dist);
  const Trajectory integral_x = distributed_integral_right(x, dist);
  const std::size_t n = x.size();
  const double h = x.grid().step();

  double lhs = 0.0;
  double boundary = 0.0;
  double stieltjes = 0.0;
  for (int c = 0; c < x.dim(); ++c) {
    double component = 0.5 * (x(0, c) * caputo_y(0, c) + x(n - 1, c) * caputo_y(n - 1, c));
    for (std::size_t i = 1; i + 1 < n; ++i) component += x(i, c) * caputo_y(i, c);
    lhs += component * h;

    boundary += y(n - 1, c) * integral_x(n - 1, c) - y(0, c) * integral_x(0, c);

    for (std::size_t i = 0; i + 1 < n; ++i) {
      stieltjes += 0.5 * (y(i, c) + y(i + 1, c)) * (integral_x(i, c) - integral_x(i + 1, c));
    }
  }
  return std::abs(lhs - boundary - stieltjes);
}

}  // namespace dofoc
