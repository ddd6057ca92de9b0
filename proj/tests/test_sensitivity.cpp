#include "cli/builtins.hpp"
#include "dofoc/errors.hpp"
#include "dofoc/sensitivity.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dofoc;

namespace {

struct Solved {
  ControlProblem problem;
  PMPSolution solution;
};

const Solved& worked() {
  static const Solved s = [] {
    ControlProblem p = cli::builtin_problem("paper_example_sec4", 20);
    PMPSolution sol = solve_pmp(p, SolverConfig{});
    return Solved{std::move(p), std::move(sol)};
  }();
  return s;
}

const Solved& classical() {
  static const Solved s = [] {
    ControlProblem p = cli::builtin_problem("classical_limit_lq", 10);
    PMPSolution sol = solve_pmp(p, SolverConfig{});
    return Solved{std::move(p), std::move(sol)};
  }();
  return s;
}

// D^psi x = u with u* = 0: df/dx vanishes.
Solved pure_integrator() {
  ControlProblem p{"integrator", 1, 1,
                   [](double, const Vector&, const Vector& u) { return Vector(u); },
                   [](double, const Vector&, const Vector&) { return Matrix(Matrix::Zero(1, 1)); },
                   [](double, const Vector& x, const Vector& u) { return -x.squaredNorm() - u.squaredNorm(); },
                   [](double, const Vector& x, const Vector&) { return Vector(-2.0 * x); },
                   ControlBox{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                   Vector::Constant(1, 0.0), 0.0, 1.0,
                   build_distribution([](double) { return 1.0; }, 12), false, std::nullopt};
  const TimeGrid grid(0.0, 1.0, 1000);
  Trajectory u(grid, 1);
  SolverConfig cfg;
  cfg.n_steps = 1000;
  Trajectory x = solve_state(p, u, cfg);
  Trajectory lam(grid, 1);
  return Solved{std::move(p), PMPSolution{std::move(x), std::move(u), std::move(lam)}};
}

}  // namespace

TEST(NeedleWindow, IndexArithmetic) {
  const TimeGrid grid(1.0, 5.0, 2000);
  const NeedleWindow w = needle_window(grid, 3.0, 0.5);
  EXPECT_EQ(w.first, 750u);
  EXPECT_EQ(w.last, 1000u);
  EXPECT_EQ(w.count(), 250u);
  EXPECT_THROW(needle_window(grid, 3.0015, 0.001), ResolutionError);
  EXPECT_EQ(needle_window(grid, 3.0005, 0.0006).count(), 1u);
}

TEST(ApplyNeedle, ZeroesWindowOnly) {
  const Solved& s = worked();
  const Trajectory u = apply_needle(s.solution.control, {3.0, Vector::Zero(1), 0.5});
  const TimeGrid& grid = u.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (t >= 2.5 - 1e-12 && t < 3.0 - 1e-12) {
      EXPECT_EQ(u(i, 0), 0.0) << t;
    } else {
      EXPECT_EQ(u(i, 0), s.solution.control(i, 0)) << t;
    }
  }
}

TEST(ApplyNeedle, Rejections) {
  const Solved& s = worked();
  const Trajectory& u = s.solution.control;
  EXPECT_THROW(apply_needle(u, {3.0, Vector::Zero(1), 0.0}), ValidationError);
  EXPECT_THROW(apply_needle(u, {5.0, Vector::Zero(1), 0.5}), ValidationError);
  EXPECT_THROW(apply_needle(u, {1.2, Vector::Zero(1), 0.5}), ValidationError);
  EXPECT_THROW(apply_needle(u, {3.0, Vector::Zero(2), 0.5}), ValidationError);
  EXPECT_THROW(apply_needle(u, {3.0015, Vector::Zero(1), 0.001}), ResolutionError);
}

TEST(NeedleCheck, UnchangedControlGivesZero) {
  const Solved& s = worked();
  const NeedleReport r = needle_optimality_check(s.problem, s.solution, {{3.0, Vector::Constant(1, 2.0), 0.5}}, SolverConfig{});
  ASSERT_EQ(r.results.size(), 1u);
  for (const NeedleRung& rung : r.results[0].rungs) EXPECT_EQ(rung.quotient, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(NeedleCheck, OptimalPassesAndSuboptimalFails) {
  const Solved& s = worked();
  std::vector<NeedleSpec> specs;
  for (double tau : {1.5, 2.5, 3.5, 4.5, 4.95}) {
    for (double v : {0.0, 0.7, 2.0}) specs.push_back({tau, Vector::Constant(1, v), 0.2});
  }
  const NeedleReport good = needle_optimality_check(s.problem, s.solution, specs, SolverConfig{});
  EXPECT_TRUE(good.passed);
  ASSERT_EQ(good.results.size(), specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) EXPECT_EQ(good.results[k].spec.tau, specs[k].tau);

  PMPSolution zero = s.solution;
  zero.control.values().setZero();
  const NeedleReport bad = needle_optimality_check(s.problem, zero, {{1.5, Vector::Constant(1, 2.0), 0.2}}, SolverConfig{});
  EXPECT_FALSE(bad.passed);
  EXPECT_GE(bad.results[0].extrapolated, 0.1);
}

TEST(NeedleCheck, UnresolvableSpecSkipped) {
  const Solved& s = worked();
  const NeedleReport r = needle_optimality_check(s.problem, s.solution, {{3.0015, Vector::Zero(1), 0.001}}, SolverConfig{}, 2);
  EXPECT_TRUE(r.results[0].skipped);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.results[0].notice.empty());
  EXPECT_THROW(needle_optimality_check(s.problem, s.solution, {{3.0, Vector::Constant(1, 5.0), 0.1}}, SolverConfig{}),
               ValidationError);
}

TEST(Continuity, WorkedExampleExponent) {
  const Solved& s = worked();
  const ContinuityProbe p = continuity_rate_probe(s.problem, s.solution, {3.0, Vector::Zero(1), 0.4},
                                                  {0.4, 0.2, 0.1, 0.05}, SolverConfig{});
  EXPECT_TRUE(p.monotone);
  EXPECT_FALSE(p.degenerate);
  EXPECT_GT(p.exponent, 0.0);
  EXPECT_LE(p.exponent, 1.0);
  EXPECT_TRUE(p.bound_holds);
  EXPECT_DOUBLE_EQ(p.bounds.lipschitz, 2.0);
}

TEST(Continuity, ClassicalExponentNearOne) {
  const Solved& s = classical();
  const ContinuityProbe p = continuity_rate_probe(s.problem, s.solution, {0.5, Vector::Constant(1, -10.0), 0.1},
                                                  {0.1, 0.05, 0.025, 0.0125}, SolverConfig{});
  EXPECT_TRUE(p.monotone);
  EXPECT_NEAR(p.exponent, 1.0, 0.15);
  EXPECT_TRUE(p.bound_holds);
  EXPECT_TRUE(std::isfinite(p.gronwall_constant));
}

TEST(Continuity, DegenerateWhenNeedleIsInvisible) {
  const Solved& s = worked();
  const ContinuityProbe p = continuity_rate_probe(s.problem, s.solution, {3.0, Vector::Constant(1, 2.0), 0.4},
                                                  {0.4, 0.2}, SolverConfig{}, LipschitzBounds{2.0, 1.0});
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.bounds.bound, 1.0);
  EXPECT_THROW(continuity_rate_probe(s.problem, s.solution, {3.0, Vector::Zero(1), 0.4}, {0.2, 0.4}, SolverConfig{}),
               ValidationError);
}

TEST(Variational, ZeroJumpGivesZero) {
  const Solved& s = worked();
  const Trajectory eta = variational_trajectory(s.problem, s.solution, {3.0, Vector::Constant(1, 2.0), 0.1}, SolverConfig{});
  EXPECT_EQ(eta.max_abs(), 0.0);
  const VariationalLadder l = variational_gap_ladder(s.problem, s.solution, {3.0, Vector::Constant(1, 2.0), 0.1},
                                                     {0.1, 0.05}, 3.5, 5.0, SolverConfig{});
  EXPECT_TRUE(l.degenerate);
}

TEST(Variational, ZeroJacobianGapShrinks) {
  const Solved s = pure_integrator();
  SolverConfig cfg;
  cfg.n_steps = 1000;
  const NeedleSpec spec{0.4, Vector::Constant(1, 1.0), 0.1};
  const Trajectory eta = variational_trajectory(s.problem, s.solution, spec, cfg);
  // Zero before the impulse, then the kernel decay of a single kick.
  EXPECT_EQ(eta(398, 0), 0.0);
  EXPECT_GT(eta(399, 0), 0.0);
  EXPECT_LT(eta(1000, 0), eta(500, 0));
  const VariationalLadder l = variational_gap_ladder(s.problem, s.solution, spec, {0.1, 0.05, 0.025, 0.0125}, 0.6, 1.0, cfg);
  for (double r : l.ratios) EXPECT_LT(r, 1.0);
}

TEST(Variational, WorkedExampleFineLadder) {
  const Solved& s = worked();
  const VariationalLadder l = variational_gap_ladder(s.problem, s.solution, {3.0, Vector::Zero(1), 0.064},
                                                     {0.064, 0.032, 0.016, 0.008}, 3.5, 5.0, SolverConfig{});
  ASSERT_EQ(l.ratios.size(), 3u);
  for (double r : l.ratios) {
    EXPECT_GE(r, 0.35);
    EXPECT_LE(r, 0.8);
  }
}
