// Randomized property checks; every case is seeded so failures replay.
#include "cli/artifacts.hpp"
#include "cli/builtins.hpp"
#include "dofoc/fractional_operators.hpp"
#include "dofoc/sensitivity.hpp"
#include "dofoc/special_functions.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace dofoc;

namespace {

constexpr int kCases = 25;

Trajectory random_path(const TimeGrid& grid, std::mt19937& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), w = coef(rng);
  return Trajectory::sample(grid, 1, [=](double t) { return Vector::Constant(1, c0 + c1 * t + c2 * std::sin(w * t)); });
}

}  // namespace

TEST(Property, CaputoOfConstantVanishes) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> order(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1e3, 1e3);
  for (int c = 0; c < kCases; ++c) {
    const TimeGrid grid(value(rng) * 1e-3, 2.0 + order(rng), 300);
    const Trajectory x = Trajectory::constant(grid, Vector::Constant(1, value(rng)));
    EXPECT_LE(caputo_derivative_left(x, order(rng)).max_abs(), 1e-12);
    const double k = order(rng);
    const OrderDistribution d = build_distribution(polynomial_weight({k, 1.0 - k, 0.5}), 6);
    EXPECT_LE(distributed_caputo_left(x, d).max_abs(), 1e-12);
  }
}

TEST(Property, OperatorsAreLinear) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> order(0.05, 0.95);
  std::uniform_real_distribution<double> scalar(-3.0, 3.0);
  const TimeGrid grid(0.0, 1.0, 200);
  for (int c = 0; c < kCases; ++c) {
    const Trajectory x = random_path(grid, rng);
    const Trajectory y = random_path(grid, rng);
    const double a = scalar(rng), b = scalar(rng), p = order(rng);
    Trajectory combo(grid, 1);
    combo.values() = a * x.values() + b * y.values();
    Trajectory expect(grid, 1);
    expect.values() = a * caputo_derivative_left(x, p).values() + b * caputo_derivative_left(y, p).values();
    EXPECT_LT(max_abs_difference(caputo_derivative_left(combo, p), expect), 1e-9);
    expect.values() = a * rl_integral_right(x, p).values() + b * rl_integral_right(y, p).values();
    EXPECT_LT(max_abs_difference(rl_integral_right(combo, p), expect), 1e-12);
  }
}

// I^q I^p x - I^{p+q} x vanishes under refinement. The max sits at the first
// node, where I^p x ~ t^p is interpolated linearly, so the rate is p + q.
TEST(Property, IntegralSemigroup) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> order(0.05, 0.45);
  for (int c = 0; c < 8; ++c) {
    std::mt19937 path_rng(rng());
    const double p = order(rng), q = order(rng);
    double previous = std::numeric_limits<double>::infinity();
    for (int n : {250, 500, 1000, 2000}) {
      std::mt19937 same = path_rng;
      const TimeGrid grid(0.0, 1.0, n);
      const Trajectory x = random_path(grid, same);
      const double gap = max_abs_difference(rl_integral_left(rl_integral_left(x, p), q), rl_integral_left(x, p + q));
      if (n > 250) EXPECT_GT(std::log2(previous / gap), 0.8 * (p + q)) << p << " " << q << " n=" << n;
      previous = gap;
    }
  }
}

TEST(Property, ReversalIsInvolution) {
  std::mt19937 rng(14);
  const TimeGrid grid(-1.0, 2.0, 77);
  for (int c = 0; c < kCases; ++c) {
    const Trajectory x = random_path(grid, rng);
    EXPECT_EQ(max_abs_difference(x.reversed().reversed(), x), 0.0);
  }
}

TEST(Property, MittagLefflerMonotone) {
  for (double a : {0.6, 0.75, 0.9, 1.0}) {
    double prev = 0.0;
    for (double z = 0.0; z <= 50.0; z += 0.5) {
      const double v = special::mittag_leffler({a, 1.0}, z);
      EXPECT_GT(v, prev) << a << " " << z;
      prev = v;
    }
  }
  for (double a : {0.3, 0.5, 0.8, 1.0}) {
    double prev = 1.0 + 1e-12;
    for (double z = 0.0; z >= -20.0; z -= 0.25) {
      const double v = special::mittag_leffler({a, 1.0}, z);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, prev) << a << " " << z;
      prev = v;
    }
  }
}

TEST(Property, ArgmaxInvariantUnderScaling) {
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  std::uniform_real_distribution<double> any(-5.0, 5.0);
  const ControlProblem base = cli::builtin_problem("classical_limit_lq", 6);
  const SolverConfig cfg;
  for (int c = 0; c < kCases; ++c) {
    const double k = pos(rng);
    ControlProblem scaled = base;
    scaled.dynamics = [f = base.dynamics, k](double t, const Vector& x, const Vector& u) { return Vector(k * f(t, x, u)); };
    scaled.cost = [L = base.cost, k](double t, const Vector& x, const Vector& u) { return k * L(t, x, u); };
    const Vector x = Vector::Constant(1, any(rng));
    const Vector lam = Vector::Constant(1, any(rng));
    const Vector u1 = maximize_hamiltonian(base, 0.3, x, lam, cfg);
    const Vector u2 = maximize_hamiltonian(scaled, 0.3, x, lam, cfg);
    EXPECT_NEAR(u1[0], u2[0], 1e-6);
  }
  const ControlProblem affine = cli::builtin_problem("paper_example_sec4", 6);
  for (int c = 0; c < kCases; ++c) {
    const double k = pos(rng);
    ControlProblem scaled = affine;
    scaled.dynamics = [f = affine.dynamics, k](double t, const Vector& x, const Vector& u) { return Vector(k * f(t, x, u)); };
    scaled.cost = [L = affine.cost, k](double t, const Vector& x, const Vector& u) { return k * L(t, x, u); };
    const Vector x = Vector::Constant(1, pos(rng));
    const Vector lam = Vector::Constant(1, any(rng) + 3.0);
    EXPECT_EQ(maximize_hamiltonian(affine, 2.0, x, lam, cfg)[0], maximize_hamiltonian(scaled, 2.0, x, lam, cfg)[0]);
  }
}

TEST(Property, MaximalityCertificate) {
  const ControlProblem p = cli::builtin_problem("paper_example_sec4", 20);
  const SolverConfig cfg;
  const PMPSolution sol = solve_pmp(p, cfg);
  const std::vector<Vector> check = control_check_grid(p.omega, cfg.control_grid);
  for (std::size_t i = 0; i < sol.state.size(); i += 7) {
    const double t = sol.state.grid()[i];
    const double current = hamiltonian(p, t, sol.state.at(i), sol.control.at(i), sol.adjoint.at(i));
    for (const Vector& w : check) {
      const double other = hamiltonian(p, t, sol.state.at(i), w, sol.adjoint.at(i));
      EXPECT_LE(other, current + 10.0 * cfg.sweep_tol * std::max(1.0, std::abs(current)));
    }
  }
}

TEST(Property, InvisibleNeedleHasZeroEffect) {
  const ControlProblem p = cli::builtin_problem("paper_example_sec4", 12);
  SolverConfig cfg;
  cfg.n_steps = 400;
  const PMPSolution sol = solve_pmp(p, cfg);
  std::mt19937 rng(16);
  std::uniform_int_distribution<std::size_t> node(40, 399);
  std::vector<NeedleSpec> specs;
  for (int c = 0; c < 10; ++c) {
    const std::size_t i = node(rng);
    const double tau = sol.control.grid()[i];
    specs.push_back({tau, sol.control.at(i - 1), 2.0 * sol.control.grid().step()});
  }
  // Only specs whose window keeps u* constant are truly invisible.
  for (const NeedleResult& r : needle_optimality_check(p, sol, specs, cfg, 1).results) {
    if (r.rungs[0].reference_constant) EXPECT_EQ(r.rungs[0].quotient, 0.0);
  }
}

TEST(Property, TailDeviationRoughlyLinear) {
  const ControlProblem p = cli::builtin_problem("paper_example_sec4", 20);
  const SolverConfig cfg;
  const PMPSolution sol = solve_pmp(p, cfg);
  const std::size_t probe = sol.state.grid().nearest_index(4.5);
  std::vector<double> per_theta;
  for (double theta : {0.4, 0.2, 0.1, 0.05}) {
    const Trajectory u = apply_needle(sol.control, {3.0, Vector::Zero(1), theta});
    const Trajectory x = solve_state(p, u, cfg);
    per_theta.push_back(std::abs(x(probe, 0) - sol.state(probe, 0)) / theta);
  }
  const auto [lo, hi] = std::minmax_element(per_theta.begin(), per_theta.end());
  EXPECT_LE(*hi / *lo, 10.0);
}

TEST(Property, CsvRoundTripIsExact) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  for (int c = 0; c < 2000; ++c) {
    const double v = std::pow(10.0, mag(rng)) * ((rng() & 1) ? 1.0 : -1.0);
    EXPECT_EQ(std::stod(cli::format_double(v)), v);
  }
}

TEST(Property, SolveIsDeterministic) {
  const ControlProblem p = cli::builtin_problem("paper_example_sec4", 10);
  SolverConfig cfg;
  cfg.n_steps = 500;
  const PMPSolution a = solve_pmp(p, cfg);
  const PMPSolution b = solve_pmp(p, cfg);
  EXPECT_EQ(max_abs_difference(a.state, b.state), 0.0);
  EXPECT_EQ(max_abs_difference(a.adjoint, b.adjoint), 0.0);
  EXPECT_EQ(a.cost_value, b.cost_value);
}
