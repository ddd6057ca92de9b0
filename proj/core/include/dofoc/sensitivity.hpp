#pragma once

#include "dofoc/pmp_engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dofoc {

/// Needle-like variation: u replaced by v on [tau - theta, tau).
struct NeedleSpec {
  double tau;
  Vector v;
  double theta;
};

/// Grid nodes [first, last) covered by a needle window.
struct NeedleWindow {
  std::size_t first;
  std::size_t last;

  std::size_t count() const noexcept { return last - first; }
};

/// Throws ResolutionError when no node of the grid lies in [tau - theta, tau).
NeedleWindow needle_window(const TimeGrid& grid, double tau, double theta);

/// Throws ValidationError if the needle leaves [a, b) or v leaves omega
/// (when a box is given), ResolutionError if the window holds no node.
Trajectory apply_needle(const Trajectory& u, const NeedleSpec& spec);

struct NeedleRung {
  double theta;
  /// Measure of the discrete window, count * h.
  double width;
  /// (J[u^theta] - J[u*]) / width.
  double quotient;
  /// u* is constant on the window, so the rung is in the first-order regime.
  bool reference_constant;
};

struct NeedleResult {
  NeedleSpec spec;
  std::vector<NeedleRung> rungs;
  double extrapolated = 0.0;
  bool passed = true;
  bool skipped = false;
  std::string notice;
};

struct NeedleReport {
  std::vector<NeedleResult> results;
  double reference_cost = 0.0;
  bool passed = true;
};

/// Estimates lim_{theta -> 0+} (J[u^theta] - J[u*]) / theta for each spec on
/// the ladder theta, theta/2, ... With ladder_length = 0 the ladder halves
/// until the window would hold fewer than 4 nodes (at most 16 rungs); a
/// positive ladder_length fixes the rung count and drops unresolvable rungs.
/// The limit is the linear Richardson value of the two smallest rungs on which
/// u* is constant, provided the last three such rungs have shrinking
/// differences; otherwise, or with fewer than two such rungs, the smallest
/// rung is reported as is. A spec passes when the limit is <= needle_tol.
/// Specs run concurrently; results keep the input order.
NeedleReport needle_optimality_check(const ControlProblem& prob, const PMPSolution& sol,
                                     const std::vector<NeedleSpec>& specs,
                                     const SolverConfig& cfg, int ladder_length = 0);

/// Lipschitz constant K of f in x and bound M of |f|.
struct LipschitzBounds {
  double lipschitz;
  double bound;
};

/// Sampled estimate over the nodes of sol and the control check grid:
/// K = max ||df/dx||_inf, M = max ||f||_inf.
LipschitzBounds estimate_lipschitz_bounds(const ControlProblem& prob, const PMPSolution& sol,
                                          const SolverConfig& cfg);

struct ContinuityProbe {
  std::vector<double> thetas;
  std::vector<double> deviations;
  /// Least-squares slope of log d against log theta.
  double exponent = 0.0;
  double log_constant = 0.0;
  bool monotone = true;
  /// All deviations vanish (the needle does not change the control).
  bool degenerate = false;
  LipschitzBounds bounds{0.0, 0.0};
  /// 2M / (m Gamma(p+1)) E_{p,1}(K (b-a)^p) with p the fitted exponent.
  double gronwall_constant = 0.0;
  bool bound_holds = true;
  std::string notice;
};

/// State deviation max_t |x^theta - x*| along a decreasing theta ladder and its
/// power-law fit. bounds defaults to estimate_lipschitz_bounds.
ContinuityProbe continuity_rate_probe(const ControlProblem& prob, const PMPSolution& sol,
                                      const NeedleSpec& spec, const std::vector<double>& ladder,
                                      const SolverConfig& cfg,
                                      std::optional<LipschitzBounds> bounds = std::nullopt);

/// First-order state sensitivity eta to the needle (tau, v).
///
/// eta solves the linearized multi-term scheme
///   C-D^psi eta = df/dx(t, x*, u*) eta + [f(tau, x*, v) - f(tau, x*, u*)] delta_tau,
/// with the impulse placed on the node just before tau (the last node a
/// discrete needle window can cover). In the single-order case this is the
/// fractional initial condition I^{1-alpha}_{tau+} eta(tau) = (1/m) [f(v) - f(u*)].
/// Returned on the full grid, zero before the impulse node.
Trajectory variational_trajectory(const ControlProblem& prob, const PMPSolution& sol,
                                  const NeedleSpec& spec, const SolverConfig& cfg);

struct VariationalLadder {
  std::vector<double> thetas;
  std::vector<double> gaps;
  /// gaps[k+1] / gaps[k].
  std::vector<double> ratios;
  bool degenerate = false;
};

/// Max-norm gap between (x^theta - x*)/width and eta over nodes in [lo, hi].
VariationalLadder variational_gap_ladder(const ControlProblem& prob, const PMPSolution& sol,
                                         const NeedleSpec& spec, const std::vector<double>& ladder,
                                         double lo, double hi, const SolverConfig& cfg);

}  // namespace dofoc
