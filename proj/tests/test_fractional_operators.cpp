#include "dofoc/errors.hpp"
#include "dofoc/fractional_operators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace dofoc;

namespace {

Trajectory sampled(const TimeGrid& grid, const std::function<double(double)>& f) {
  return Trajectory::sample(grid, 1, [&](double t) { return Vector::Constant(1, f(t)); });
}

// (1/Gamma(p)) int_a^t (t - s)^{p-1} f(s) ds with w = (t - s)^p removing the singularity.
double rl_integral_oracle(const std::function<double(double)>& f, double a, double t, double p) {
  if (t == a) return 0.0;
  auto integrand = [&](double w) { return f(t - std::pow(w, 1.0 / p)); };
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::pow(t - a, p), 15, 1e-13);
  return value / (p * boost::math::tgamma(p));
}

double max_error(const Trajectory& got, const std::function<double(double)>& exact, std::size_t first = 0,
                 std::size_t last_excluded = 0) {
  double err = 0.0;
  for (std::size_t i = first; i + last_excluded < got.size(); ++i) {
    err = std::max(err, std::abs(got(i, 0) - exact(got.grid()[i])));
  }
  return err;
}

}  // namespace

TEST(RlIntegral, ConstantIsExact) {
  const TimeGrid grid(0.0, 1.0, 200);
  const Trajectory one = Trajectory::constant(grid, Vector::Constant(1, 1.0));
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    const Trajectory out = rl_integral_left(one, p);
    EXPECT_LT(max_error(out, [p](double t) { return std::pow(t, p) / boost::math::tgamma(p + 1.0); }), 1e-13) << p;
    const Trajectory rect = rl_integral_left(one, p, ProductRule::PiecewiseConstant);
    EXPECT_LT(max_error(rect, [p](double t) { return std::pow(t, p) / boost::math::tgamma(p + 1.0); }), 1e-13) << p;
  }
}

TEST(RlIntegral, LinearRuleExactOnLines) {
  const TimeGrid grid(0.5, 2.0, 150);
  const Trajectory x = sampled(grid, [](double t) { return 3.0 * t - 1.0; });
  for (double p : {0.3, 0.8}) {
    auto exact = [p](double t) {
      const double s = t - 0.5;
      return 0.5 * std::pow(s, p) / boost::math::tgamma(p + 1.0) + 3.0 * std::pow(s, p + 1.0) / boost::math::tgamma(p + 2.0);
    };
    EXPECT_LT(max_error(rl_integral_left(x, p), exact), 1e-12);
  }
}

TEST(RlIntegral, SmoothFunctionAgainstQuadrature) {
  const TimeGrid grid(0.0, 2.0, 800);
  auto f = [](double t) { return std::sin(3.0 * t) + t * t; };
  const Trajectory x = sampled(grid, f);
  for (double p : {0.2, 0.5, 0.9}) {
    const Trajectory out = rl_integral_left(x, p);
    for (std::size_t i : {100u, 401u, 800u}) {
      EXPECT_NEAR(out(i, 0), rl_integral_oracle(f, 0.0, grid[i], p), 2e-5) << p << " " << i;
    }
    // Rectangle rule is first order.
    const Trajectory rect = rl_integral_left(x, p, ProductRule::PiecewiseConstant);
    EXPECT_NEAR(rect(800, 0), rl_integral_oracle(f, 0.0, 2.0, p), 2e-2);
  }
}

TEST(RlIntegral, RightSideMirrorsLeft) {
  const TimeGrid grid(0.0, 1.0, 400);
  const Trajectory x = sampled(grid, [](double t) { return 1.0 - t; });
  const double p = 0.6;
  const Trajectory out = rl_integral_right(x, p);
  EXPECT_LT(max_error(out, [p](double t) { return std::pow(1.0 - t, p + 1.0) / boost::math::tgamma(p + 2.0); }), 1e-12);
  EXPECT_EQ(out(400, 0), 0.0);
}

TEST(Caputo, PowerFunction) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory x = sampled(grid, [](double t) { return t * t; });
  for (double a : {0.1, 0.5, 0.9}) {
    auto exact = [a](double t) { return 2.0 * std::pow(t, 2.0 - a) / boost::math::tgamma(3.0 - a); };
    EXPECT_LT(max_error(caputo_derivative_left(x, a), exact), 2e-3) << a;
  }
}

TEST(Caputo, RightPowerFunction) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory x = sampled(grid, [](double t) { return (1.0 - t) * (1.0 - t); });
  const double a = 0.4;
  auto exact = [a](double t) { return 2.0 * std::pow(1.0 - t, 2.0 - a) / boost::math::tgamma(3.0 - a); };
  EXPECT_LT(max_error(caputo_derivative_right(x, a), exact), 1e-3);
}

TEST(Caputo, OrderEndpoints) {
  const TimeGrid grid(0.0, 1.0, 1000);
  const Trajectory x = sampled(grid, [](double t) { return std::exp(t); });
  const Trajectory zero = caputo_derivative_left(x, 0.0);
  EXPECT_LT(max_error(zero, [](double t) { return std::exp(t) - 1.0; }), 1e-15);
  const Trajectory one = caputo_derivative_left(x, 1.0);
  EXPECT_LT(max_error(one, [](double t) { return std::exp(t); }), 2e-3);
}

TEST(Caputo, KillsConstants) {
  const TimeGrid grid(0.0, 3.0, 500);
  const Trajectory c = Trajectory::constant(grid, Vector::Constant(2, 4.25));
  for (double a : {0.0, 0.3, 0.99, 1.0}) {
    EXPECT_EQ(caputo_derivative_left(c, a).max_abs(), 0.0);
    EXPECT_EQ(caputo_derivative_right(c, a).max_abs(), 0.0);
  }
  const OrderDistribution d = build_distribution([](double a) { return 1.0 + a; }, 12);
  EXPECT_EQ(distributed_caputo_left(c, d).max_abs(), 0.0);
  EXPECT_EQ(distributed_caputo_right(c, d).max_abs(), 0.0);
}

TEST(RlDerivative, ConstantGivesPowerLaw) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory one = Trajectory::constant(grid, Vector::Constant(1, 1.0));
  const double a = 0.5;
  const Trajectory d = rl_derivative_left(one, a);
  for (std::size_t i : {200u, 1000u, 1999u}) {
    const double t = grid[i];
    EXPECT_NEAR(d(i, 0), std::pow(t, -a) / boost::math::tgamma(1.0 - a), 2e-3) << t;
  }
}

TEST(RlDerivative, VanishingStartAgreesWithCaputo) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory x = sampled(grid, [](double t) { return t; });
  const double a = 0.3;
  auto exact = [a](double t) { return std::pow(t, 1.0 - a) / boost::math::tgamma(2.0 - a); };
  EXPECT_LT(max_error(rl_derivative_left(x, a), exact, 1, 1), 1e-3);
  EXPECT_LT(max_error(caputo_derivative_left(x, a), exact), 1e-12);
}

TEST(Distributed, CaputoOfLineAgainstOrderQuadrature) {
  const TimeGrid grid(0.0, 1.0, 1000);
  const Trajectory x = sampled(grid, [](double t) { return t; });
  const OrderDistribution d = build_distribution([](double) { return 1.0; }, 20);
  const Trajectory out = distributed_caputo_left(x, d);
  for (std::size_t i : {250u, 1000u}) {
    const double t = grid[i];
    const double exact = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [t](double a) { return std::pow(t, 1.0 - a) / boost::math::tgamma(2.0 - a); }, 0.0, 1.0);
    EXPECT_NEAR(out(i, 0), exact, 1e-10);
  }
}

TEST(Distributed, IntegralIsOrderAverage) {
  const TimeGrid grid(0.0, 1.0, 400);
  const Trajectory x = sampled(grid, [](double t) { return std::cos(t); });
  const OrderDistribution d = build_distribution(polynomial_weight({0.0, 1.0 / 3.0}), 8);
  const Trajectory total = distributed_integral_left(x, d);
  Trajectory sum(grid, 1);
  for (std::size_t j = 0; j < d.size(); ++j) {
    sum.values() += d.coefficients()[j] * rl_integral_left(x, 1.0 - d.nodes()[j]).values();
  }
  EXPECT_LT(max_abs_difference(total, sum), 1e-13);
}

TEST(Distributed, RelationAndIntegrationByParts) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory x = sampled(grid, [](double t) { return std::sin(t); });
  const Trajectory y = sampled(grid, [](double t) { return t * t; });
  const OrderDistribution d = build_distribution([](double) { return 1.0; }, 20);
  EXPECT_LT(rl_caputo_relation_residual(y, d, Side::Left), 1e-3);
  EXPECT_LT(rl_caputo_relation_residual(x, d, Side::Right), 1e-3);
  EXPECT_LT(integration_by_parts_residual(x, y, d), 1e-3);
}

// Nonzero endpoint value and slope: x = cos t on the left, its mirror on the right.
TEST(Distributed, RelationConvergesWithEndpointTerms) {
  const OrderDistribution d = build_distribution([](double) { return 1.0; }, 20);
  double left_prev = 1.0, right_prev = 1.0;
  for (int n : {500, 1000, 2000, 4000}) {
    const TimeGrid grid(0.0, 1.0, n);
    const double left = rl_caputo_relation_residual(sampled(grid, [](double t) { return std::cos(t) + t; }), d, Side::Left);
    const double right = rl_caputo_relation_residual(sampled(grid, [](double t) { return std::cos(1.0 - t); }), d, Side::Right);
    EXPECT_LT(left, 0.7 * left_prev) << n;
    EXPECT_LT(right, 0.7 * right_prev) << n;
    left_prev = left;
    right_prev = right;
  }
  EXPECT_LT(left_prev, 1e-4);
}

TEST(RLDerivative, ConstantMatchesClosedForm) {
  const TimeGrid grid(0.0, 2.0, 400);
  const Trajectory x = Trajectory::constant(grid, Vector::Constant(1, 3.0));
  for (double a : {0.2, 0.5, 0.9}) {
    const Trajectory d = rl_derivative_left(x, a);
    for (std::size_t i : {1u, 17u, 400u}) {
      EXPECT_NEAR(d(i, 0), 3.0 * std::pow(grid[i], -a) / boost::math::tgamma(1.0 - a), 1e-9 * std::abs(d(i, 0))) << a;
    }
  }
}

TEST(L1Kernel, SingleOrderFormulaAndMonotone) {
  const double a = 0.4;
  const double h = 0.01;
  const std::vector<double> k = l1_kernel(a, h, 100);
  ASSERT_EQ(k.size(), 100u);
  const double scale = std::pow(h, -a) / boost::math::tgamma(2.0 - a);
  for (int m : {0, 1, 7, 99}) {
    EXPECT_NEAR(k[static_cast<std::size_t>(m)], scale * (std::pow(m + 1.0, 1.0 - a) - std::pow(m, 1.0 - a)), 1e-12);
  }
  for (std::size_t m = 1; m < k.size(); ++m) {
    EXPECT_GT(k[m], 0.0);
    EXPECT_LT(k[m], k[m - 1]);
  }
}

TEST(Operators, OrderOutOfRange) {
  const TimeGrid grid(0.0, 1.0, 10);
  const Trajectory x = Trajectory::constant(grid, Vector::Constant(1, 1.0));
  EXPECT_THROW(rl_integral_left(x, 0.0), DomainError);
  EXPECT_THROW(rl_integral_left(x, 1.5), DomainError);
  EXPECT_THROW(caputo_derivative_left(x, -0.1), DomainError);
  EXPECT_THROW(rl_derivative_right(x, 1.1), DomainError);
}
