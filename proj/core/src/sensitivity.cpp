#include "dofoc/sensitivity.hpp"

#include "dofoc/errors.hpp"
#include "dofoc/fractional_operators.hpp"
#include "dofoc/special_functions.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace dofoc {
namespace {

// Slack in grid-index arithmetic so that tau and tau - theta landing on a node
// up to rounding are treated as on the node.
constexpr double kIndexSlack = 1e-9;

// Automatic ladders halve theta while the window keeps at least this many
// nodes, up to kMaxAutoRungs rungs.
constexpr std::size_t kMinAutoNodes = 4;
constexpr int kMaxAutoRungs = 16;

std::size_t first_index_at_or_after(const TimeGrid& grid, double t) {
  const double s = (t - grid.start()) / grid.step();
  const double c = std::ceil(s - kIndexSlack);
  if (c <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(c), grid.size());
}

bool constant_on(const Trajectory& u, const NeedleWindow& w) {
  const Vector ref = u.at(w.first);
  for (std::size_t i = w.first + 1; i < w.last; ++i) {
    if ((u.at(i) - ref).cwiseAbs().maxCoeff() > 0.0) return false;
  }
  return true;
}

// Max over [lo, hi] nodes of |(x_theta - x_ref) / width - eta|.
double gap_on(const Trajectory& x_theta, const Trajectory& x_ref, double width, const Trajectory& eta,
              double lo, double hi) {
  const TimeGrid& grid = x_ref.grid();
  double gap = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (t < lo || t > hi) continue;
    const Vector q = (x_theta.at(i) - x_ref.at(i)) / width - eta.at(i);
    gap = std::max(gap, q.cwiseAbs().maxCoeff());
  }
  return gap;
}

NeedleResult check_one(const ControlProblem& prob, const Trajectory& u_star, double reference_cost,
                       const NeedleSpec& spec, const SolverConfig& cfg, int ladder_length) {
  NeedleResult result{spec, {}, 0.0, true, false, {}};
  const TimeGrid& grid = u_star.grid();
  const bool automatic = ladder_length == 0;
  const int rungs = automatic ? kMaxAutoRungs : ladder_length;
  double theta = spec.theta;
  for (int r = 0; r < rungs; ++r, theta *= 0.5) {
    NeedleWindow window{};
    try {
      window = needle_window(grid, spec.tau, theta);
    } catch (const ResolutionError&) {
      if (automatic) break;
      continue;
    }
    if (automatic && window.count() < kMinAutoNodes && !result.rungs.empty()) break;
    const NeedleSpec rung_spec{spec.tau, spec.v, theta};
    const Trajectory u = apply_needle(u_star, rung_spec);
    const double cost = cost_functional(prob, solve_state(prob, u, cfg), u);
    const double width = static_cast<double>(window.count()) * grid.step();
    result.rungs.push_back({theta, width, (cost - reference_cost) / width, constant_on(u_star, window)});
  }
  if (result.rungs.empty()) {
    result.skipped = true;
    result.notice = "no rung of the theta ladder is resolved by the grid; refine n_steps";
    return result;
  }

  std::vector<const NeedleRung*> regular;
  for (const NeedleRung& rung : result.rungs) {
    if (rung.reference_constant) regular.push_back(&rung);
  }
  // Differences of the last three regular rungs must shrink for the linear
  // model to hold; otherwise the smallest rung is the estimate.
  bool asymptotic = regular.size() >= 2;
  if (regular.size() >= 3) {
    const double d_coarse = regular[regular.size() - 2]->quotient - regular[regular.size() - 3]->quotient;
    const double d_fine = regular.back()->quotient - regular[regular.size() - 2]->quotient;
    asymptotic = std::abs(d_fine) < std::abs(d_coarse);
  }
  if (regular.size() >= 2 && !asymptotic) {
    result.extrapolated = regular.back()->quotient;
    result.notice = "rung differences do not shrink; smallest regular rung reported";
  } else if (regular.size() >= 2) {
    const NeedleRung& coarse = *regular[regular.size() - 2];
    const NeedleRung& fine = *regular.back();
    if (coarse.width > fine.width) {
      result.extrapolated =
          fine.quotient + (fine.quotient - coarse.quotient) * fine.width / (coarse.width - fine.width);
    } else {
      result.extrapolated = fine.quotient;
    }
  } else {
    result.extrapolated = result.rungs.back().quotient;
    result.notice = "fewer than two rungs with a constant reference control; smallest rung reported";
  }
  result.passed = result.extrapolated <= cfg.needle_tol;
  return result;
}

}  // namespace

NeedleWindow needle_window(const TimeGrid& grid, double tau, double theta) {
  const std::size_t first = first_index_at_or_after(grid, tau - theta);
  const std::size_t last = first_index_at_or_after(grid, tau);
  if (last <= first) {
    std::ostringstream os;
    os << "needle window [" << tau - theta << ", " << tau << ") contains no grid node (step "
       << grid.step() << "); use a finer grid";
    throw ResolutionError(os.str());
  }
  return {first, last};
}

Trajectory apply_needle(const Trajectory& u, const NeedleSpec& spec) {
  const TimeGrid& grid = u.grid();
  const double slack = 1e-12 * (grid.end() - grid.start());
  if (!(spec.theta > 0.0) || !std::isfinite(spec.theta)) {
    throw ValidationError("needle: theta must be positive");
  }
  if (!(spec.tau >= grid.start() && spec.tau < grid.end())) {
    throw ValidationError("needle: tau outside [a, b)");
  }
  if (spec.tau - spec.theta < grid.start() - slack) {
    throw ValidationError("needle: window starts before a");
  }
  if (spec.v.size() != u.dim() || !spec.v.allFinite()) {
    throw ValidationError("needle: v has the wrong dimension or is not finite");
  }
  const NeedleWindow window = needle_window(grid, spec.tau, spec.theta);
  Trajectory out = u;
  for (std::size_t i = window.first; i < window.last; ++i) out.set(i, spec.v);
  return out;
}

NeedleReport needle_optimality_check(const ControlProblem& prob, const PMPSolution& sol,
                                     const std::vector<NeedleSpec>& specs,
                                     const SolverConfig& cfg, int ladder_length) {
  if (ladder_length < 0) throw ValidationError("needle check: ladder_length must be non-negative");
  for (const NeedleSpec& s : specs) {
    if (!prob.omega.contains(s.v, 1e-12)) throw ValidationError("needle: v outside the control box");
  }
  NeedleReport report;
  const Trajectory& u_star = sol.control;
  report.reference_cost = cost_functional(prob, solve_state(prob, u_star, cfg), u_star);

  std::vector<std::future<NeedleResult>> jobs;
  jobs.reserve(specs.size());
  for (const NeedleSpec& s : specs) {
    jobs.push_back(std::async(std::launch::async, check_one, std::cref(prob), std::cref(u_star),
                              report.reference_cost, std::cref(s), std::cref(cfg), ladder_length));
  }
  for (auto& job : jobs) {
    report.results.push_back(job.get());
    report.passed = report.passed && report.results.back().passed;
  }
  return report;
}

LipschitzBounds estimate_lipschitz_bounds(const ControlProblem& prob, const PMPSolution& sol,
                                          const SolverConfig& cfg) {
  const std::vector<Vector> controls = control_check_grid(prob.omega, cfg.control_grid);
  LipschitzBounds out{0.0, 0.0};
  const TimeGrid& grid = sol.state.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector x = sol.state.at(i);
    for (const Vector& w : controls) {
      const Matrix jac = prob.eval_dynamics_dx(grid[i], x, w);
      out.lipschitz = std::max(out.lipschitz, jac.cwiseAbs().rowwise().sum().maxCoeff());
      out.bound = std::max(out.bound, prob.eval_dynamics(grid[i], x, w).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

ContinuityProbe continuity_rate_probe(const ControlProblem& prob, const PMPSolution& sol,
                                      const NeedleSpec& spec, const std::vector<double>& ladder,
                                      const SolverConfig& cfg,
                                      std::optional<LipschitzBounds> bounds) {
  if (ladder.size() < 2) throw ValidationError("continuity probe: ladder needs at least two values");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (!(ladder[k] < ladder[k - 1]) || !(ladder[k] > 0.0)) {
      throw ValidationError("continuity probe: ladder must be positive and strictly decreasing");
    }
  }
  ContinuityProbe probe;
  probe.thetas = ladder;
  const Trajectory x_ref = solve_state(prob, sol.control, cfg);
  for (double theta : ladder) {
    const Trajectory u = apply_needle(sol.control, {spec.tau, spec.v, theta});
    probe.deviations.push_back(max_abs_difference(solve_state(prob, u, cfg), x_ref));
  }

  probe.degenerate = std::all_of(probe.deviations.begin(), probe.deviations.end(),
                                 [](double d) { return d == 0.0; });
  probe.bounds = bounds.value_or(estimate_lipschitz_bounds(prob, sol, cfg));
  if (probe.degenerate) {
    probe.notice = "needle leaves the control unchanged; deviations vanish";
    return probe;
  }
  for (std::size_t k = 1; k < probe.deviations.size(); ++k) {
    if (!(probe.deviations[k] < probe.deviations[k - 1])) probe.monotone = false;
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(probe.deviations[k] > 0.0)) continue;
    const double lx = std::log(ladder[k]);
    const double ly = std::log(probe.deviations[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 2) {
    probe.monotone = false;
    probe.notice = "fewer than two nonzero deviations; no fit";
    return probe;
  }
  const double n = used;
  probe.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  probe.log_constant = (sy - probe.exponent * sx) / n;

  if (probe.exponent > 0.0) {
    const double p = probe.exponent;
    const double horizon = prob.b - prob.a;
    try {
      const double ml = special::mittag_leffler({p, 1.0},
                                                probe.bounds.lipschitz * std::pow(horizon, p));
      probe.gronwall_constant = 2.0 * probe.bounds.bound / (prob.dist.mass() * special::gamma_fn(p + 1.0)) * ml;
    } catch (const AccuracyError& e) {
      probe.gronwall_constant = std::numeric_limits<double>::infinity();
      probe.notice = std::string("Gronwall constant not evaluated: ") + e.what();
    }
    if (!std::isfinite(probe.gronwall_constant)) {
      probe.gronwall_constant = std::numeric_limits<double>::infinity();
    }
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      if (probe.deviations[k] > probe.gronwall_constant * std::pow(ladder[k], p)) probe.bound_holds = false;
    }
  } else {
    probe.bound_holds = false;
    probe.notice = "non-positive fitted exponent";
  }
  return probe;
}

Trajectory variational_trajectory(const ControlProblem& prob, const PMPSolution& sol,
                                  const NeedleSpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  const TimeGrid& grid = sol.control.grid();
  const std::size_t last = first_index_at_or_after(grid, spec.tau);
  if (last == 0) throw ResolutionError("variational trajectory: tau does not follow any grid node");
  if (spec.v.size() != prob.control_dim) throw ValidationError("variational trajectory: v has the wrong dimension");
  const std::size_t j = last - 1;
  const int n_dim = prob.state_dim;

  Trajectory eta(grid, n_dim);
  const Vector xj = sol.state.at(j);
  const Vector jump = (prob.eval_dynamics(grid[j], xj, spec.v) - prob.eval_dynamics(grid[j], xj, sol.control.at(j))) /
                      grid.step();
  // The control at node 0 never enters the march, so a needle ending there is invisible.
  if (j == 0 || jump.cwiseAbs().maxCoeff() == 0.0) return eta;

  const std::vector<double> kernel = l1_kernel(prob.dist, grid.step(), grid.steps());
  const double k0 = kernel.front();
  const auto n_steps = static_cast<std::size_t>(grid.steps());
  // Column-major differences eta_{k+1} - eta_k; zero before the impulse.
  Matrix diff = Matrix::Zero(static_cast<Eigen::Index>(n_steps), n_dim);
  const Matrix identity = Matrix::Identity(n_dim, n_dim);
  Vector hist(n_dim);
  for (std::size_t n = j; n <= n_steps; ++n) {
    for (int c = 0; c < n_dim; ++c) {
      double acc = 0.0;
      const double* col = diff.col(c).data();
      for (std::size_t k = j - 1; k + 1 < n; ++k) acc += kernel[n - 1 - k] * col[k];
      hist[c] = acc;
    }
    const Matrix a_n = prob.eval_dynamics_dx(grid[n], sol.state.at(n), sol.control.at(n));
    const Vector prev = eta.at(n - 1);
    Vector rhs = k0 * prev - hist;
    if (n == j) rhs += jump;
    const Vector next = (k0 * identity - a_n).partialPivLu().solve(rhs);
    if (!next.allFinite()) throw DynamicsEvaluationError("variational trajectory: non-finite value");
    eta.set(n, next);
    diff.row(static_cast<Eigen::Index>(n - 1)) = (next - prev).transpose();
  }
  return eta;
}

VariationalLadder variational_gap_ladder(const ControlProblem& prob, const PMPSolution& sol,
                                         const NeedleSpec& spec, const std::vector<double>& ladder,
                                         double lo, double hi, const SolverConfig& cfg) {
  if (!(lo <= hi)) throw ValidationError("variational ladder: empty comparison interval");
  VariationalLadder out;
  out.thetas = ladder;
  const Trajectory eta = variational_trajectory(prob, sol, spec, cfg);
  const Trajectory x_ref = solve_state(prob, sol.control, cfg);
  const TimeGrid& grid = x_ref.grid();
  for (double theta : ladder) {
    const NeedleWindow window = needle_window(grid, spec.tau, theta);
    const Trajectory u = apply_needle(sol.control, {spec.tau, spec.v, theta});
    const double width = static_cast<double>(window.count()) * grid.step();
    out.gaps.push_back(gap_on(solve_state(prob, u, cfg), x_ref, width, eta, lo, hi));
  }
  for (std::size_t k = 1; k < out.gaps.size(); ++k) {
    out.ratios.push_back(out.gaps[k - 1] > 0.0 ? out.gaps[k] / out.gaps[k - 1] : 0.0);
  }
  out.degenerate = eta.max_abs() == 0.0 &&
                   std::all_of(out.gaps.begin(), out.gaps.end(), [](double g) { return g == 0.0; });
  return out;
}

}  // namespace dofoc
