#include "dofoc/dofde_solvers.hpp"
#include "dofoc/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dofoc;

namespace {

OrderDistribution narrow_at(double center) { return build_bump_distribution(Bump{center, 1e-3}, 10); }

ForwardProblem linear_forward(const TimeGrid& grid, const OrderDistribution& dist, double rate) {
  return ForwardProblem{[rate](double, const Vector& x, const Vector&) { return Vector(rate * x); },
                        Trajectory(grid, 1), Vector::Constant(1, 1.0), dist, grid};
}

}  // namespace

TEST(Forward, ClassicalGrowth) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory x = solve_forward(linear_forward(grid, narrow_at(1.0), 1.0), SolverConfig{});
  EXPECT_NEAR(x(2000, 0), std::exp(1.0), 5e-3);
  EXPECT_EQ(x(0, 0), 1.0);
}

// C-D^{1/2} x = -x, x(0) = 1 has x = E_{1/2}(-sqrt t) = exp(t) erfc(sqrt t).
TEST(Forward, HalfOrderRelaxation) {
  const TimeGrid grid(0.0, 2.0, 2000);
  const Trajectory x = solve_forward(linear_forward(grid, narrow_at(0.5), -1.0), SolverConfig{});
  for (std::size_t i : {100u, 1000u, 2000u}) {
    const double t = grid[i];
    EXPECT_NEAR(x(i, 0), std::exp(t) * std::erfc(std::sqrt(t)), 3e-3) << t;
  }
}

TEST(Forward, RotationSystem) {
  const TimeGrid grid(0.0, 2.0, 4000);
  ForwardProblem p{[](double, const Vector& x, const Vector&) { return Vector(Vector{{x[1], -x[0]}}); },
                   Trajectory(grid, 1), Vector{{1.0, 0.0}}, narrow_at(1.0), grid};
  const Trajectory x = solve_forward(p, SolverConfig{});
  EXPECT_NEAR(x(4000, 0), std::cos(2.0), 5e-3);
  EXPECT_NEAR(x(4000, 1), -std::sin(2.0), 5e-3);
}

TEST(Forward, DistributedResidualThroughOperators) {
  const TimeGrid grid(0.0, 1.0, 500);
  const OrderDistribution d = build_distribution([](double) { return 1.0; }, 16);
  ForwardProblem p{[](double t, const Vector& x, const Vector& u) { return Vector(-x + u * std::cos(t)); },
                   Trajectory::constant(grid, Vector::Constant(1, 0.7)), Vector::Constant(1, 2.0), d, grid};
  SolverConfig cfg;
  cfg.newton_tol = 1e-13;
  const Trajectory x = solve_forward(p, cfg);
  EXPECT_LT(residual_forward(x, p), 1e-10);
  // Pure relaxation toward the forcing stays bounded and positive.
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_GT(x(i, 0), 0.0);
}

TEST(Forward, Errors) {
  const TimeGrid grid(0.0, 1.0, 10);
  const TimeGrid other(0.0, 1.0, 20);
  ForwardProblem p = linear_forward(grid, narrow_at(1.0), 1.0);
  p.control = Trajectory(other, 1);
  EXPECT_THROW(solve_forward(p, SolverConfig{}), GridMismatchError);

  ForwardProblem nan = linear_forward(grid, narrow_at(1.0), 1.0);
  nan.rhs = [](double, const Vector&, const Vector&) { return Vector::Constant(1, std::nan("")); };
  EXPECT_THROW(solve_forward(nan, SolverConfig{}), DynamicsEvaluationError);

  const TimeGrid coarse(0.0, 1.0, 2);
  SolverConfig few;
  few.max_inner_iters = 5;
  try {
    solve_forward(linear_forward(coarse, narrow_at(1.0), -50.0), few);
    FAIL() << "expected SolverDivergenceError";
  } catch (const SolverDivergenceError& e) {
    EXPECT_EQ(e.step(), 1u);
  }

  SolverConfig bad;
  bad.n_steps = 1;
  EXPECT_THROW(solve_forward(linear_forward(grid, narrow_at(1.0), 1.0), bad), ValidationError);
}

TEST(Adjoint, ClassicalTerminalProblem) {
  // -lambda' = a lambda + 1, lambda(b) = 0.
  const double a = 0.8;
  const TimeGrid grid(0.0, 2.0, 2000);
  const Trajectory state(grid, 1);
  AdjointProblem p{[a](double, const Vector&, const Vector&, const Vector& lam) {
                     return Vector(a * lam + Vector::Ones(1));
                   },
                   state, state, narrow_at(1.0), grid};
  const AdjointSolution sol = solve_adjoint(p, SolverConfig{});
  EXPECT_EQ(sol.adjoint(2000, 0), 0.0);
  for (std::size_t i : {0u, 500u, 1500u}) {
    const double t = grid[i];
    EXPECT_NEAR(sol.adjoint(i, 0), std::expm1(a * (2.0 - t)) / a, 1e-2) << t;
  }
  EXPECT_LT(sol.transversality_residual, 1e-2);
}

// D^alpha_{b-} lambda = 1 with lambda(b) = 0 gives (b - t)^alpha / Gamma(1 + alpha).
TEST(Adjoint, FractionalPowerLaw) {
  const TimeGrid grid(0.0, 1.0, 2000);
  const Trajectory state(grid, 1);
  AdjointProblem p{[](double, const Vector&, const Vector&, const Vector&) { return Vector(Vector::Ones(1)); },
                   state, state, narrow_at(0.5), grid};
  const AdjointSolution sol = solve_adjoint(p, SolverConfig{});
  for (std::size_t i : {0u, 1000u, 1900u}) {
    const double s = 1.0 - grid[i];
    EXPECT_NEAR(sol.adjoint(i, 0), std::sqrt(s) / std::tgamma(1.5), 2e-3) << s;
  }
}

TEST(Adjoint, GridMismatch) {
  const TimeGrid grid(0.0, 1.0, 10);
  const TimeGrid other(0.0, 2.0, 10);
  AdjointProblem p{[](double, const Vector&, const Vector&, const Vector& lam) { return lam; },
                   Trajectory(grid, 1), Trajectory(other, 1), narrow_at(1.0), grid};
  EXPECT_THROW(solve_adjoint(p, SolverConfig{}), GridMismatchError);
}
