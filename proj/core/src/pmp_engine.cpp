#include "dofoc/pmp_engine.hpp"

#include "dofoc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace dofoc {
namespace {

constexpr double kInvGolden = 0.6180339887498949;
constexpr int kGoldenIterations = 80;
constexpr int kRefinementPasses = 2;

double grid_value(double lo, double hi, int i, int points) {
  if (points == 1 || hi == lo) return 0.5 * (lo + hi);
  if (i == points - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / (points - 1);
}

// Golden-section maximization of H along coordinate k on [lo, hi].
void refine_coordinate(const ControlProblem& prob, double t, const Vector& x, const Vector& lam,
                       Vector& u, double& best, int k, double lo, double hi) {
  Vector probe = u;
  auto eval = [&](double value) {
    probe[k] = value;
    return hamiltonian(prob, t, x, probe, lam);
  };
  double left = lo;
  double right = hi;
  double c = right - kInvGolden * (right - left);
  double d = left + kInvGolden * (right - left);
  double fc = eval(c);
  double fd = eval(d);
  for (int it = 0; it < kGoldenIterations && right - left > 1e-14 * std::max(1.0, std::abs(left)); ++it) {
    if (fc >= fd) {
      right = d;
      d = c;
      fd = fc;
      c = right - kInvGolden * (right - left);
      fc = eval(c);
    } else {
      left = c;
      c = d;
      fc = fd;
      d = left + kInvGolden * (right - left);
      fd = eval(d);
    }
  }
  const double candidate = 0.5 * (left + right);
  const double value = eval(candidate);
  if (value > best) {
    best = value;
    u[k] = candidate;
  }
}

}  // namespace

double hamiltonian(const ControlProblem& prob, double t, const Vector& x, const Vector& u,
                   const Vector& lam) {
  return prob.eval_cost(t, x, u) + lam.dot(prob.eval_dynamics(t, x, u));
}

Vector hamiltonian_dx(const ControlProblem& prob, double t, const Vector& x, const Vector& u,
                      const Vector& lam) {
  return prob.eval_cost_dx(t, x, u) + prob.eval_dynamics_dx(t, x, u).transpose() * lam;
}

std::vector<Vector> control_check_grid(const ControlBox& box, int points_per_dim) {
  const int m = box.dim();
  std::vector<int> counts(static_cast<std::size_t>(m));
  std::size_t total = 1;
  for (int k = 0; k < m; ++k) {
    counts[static_cast<std::size_t>(k)] = box.hi[k] > box.lo[k] ? points_per_dim : 1;
    total *= static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
  }
  std::vector<Vector> out;
  out.reserve(total);
  std::vector<int> index(static_cast<std::size_t>(m), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector w(m);
    for (int k = 0; k < m; ++k) {
      w[k] = grid_value(box.lo[k], box.hi[k], index[static_cast<std::size_t>(k)], counts[static_cast<std::size_t>(k)]);
    }
    out.push_back(std::move(w));
    for (int k = 0; k < m; ++k) {
      auto& i = index[static_cast<std::size_t>(k)];
      if (++i < counts[static_cast<std::size_t>(k)]) break;
      i = 0;
    }
  }
  return out;
}

Vector maximize_hamiltonian(const ControlProblem& prob, double t, const Vector& x, const Vector& lam,
                            const SolverConfig& cfg) {
  const ControlBox& box = prob.omega;
  if (prob.control_affine) {
    const double base = hamiltonian(prob, t, x, box.lo, lam);
    Vector u = box.lo;
    Vector probe = box.lo;
    for (int k = 0; k < box.dim(); ++k) {
      if (box.hi[k] == box.lo[k]) continue;
      probe[k] = box.hi[k];
      // H(lo + (hi_k - lo_k) e_k) - H(lo) = sigma_k (hi_k - lo_k).
      const double switching = hamiltonian(prob, t, x, probe, lam) - base;
      probe[k] = box.lo[k];
      u[k] = switching > 0.0 ? box.hi[k] : box.lo[k];
    }
    return u;
  }

  Vector best_u = box.midpoint();
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& w : control_check_grid(box, cfg.control_grid)) {
    const double value = hamiltonian(prob, t, x, w, lam);
    if (value > best) {
      best = value;
      best_u = w;
    }
  }
  for (int pass = 0; pass < kRefinementPasses; ++pass) {
    for (int k = 0; k < box.dim(); ++k) {
      if (box.hi[k] == box.lo[k]) continue;
      const double cell = (box.hi[k] - box.lo[k]) / std::max(1, cfg.control_grid - 1);
      const double lo = std::max(box.lo[k], best_u[k] - cell);
      const double hi = std::min(box.hi[k], best_u[k] + cell);
      refine_coordinate(prob, t, x, lam, best_u, best, k, lo, hi);
    }
  }
  return best_u;
}

double cost_functional(const ControlProblem& prob, const Trajectory& x, const Trajectory& u) {
  require_same_grid(x, u, "cost_functional");
  const TimeGrid& grid = x.grid();
  const std::size_t n = grid.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    sum += weight * prob.eval_cost(grid[i], x.at(i), u.at(i));
  }
  return sum * grid.step();
}

Trajectory solve_state(const ControlProblem& prob, const Trajectory& u, const SolverConfig& cfg) {
  ForwardProblem fp{
      [&prob](double t, const Vector& x, const Vector& w) { return prob.eval_dynamics(t, x, w); },
      u, prob.x0, prob.dist, u.grid()};
  return solve_forward(fp, cfg);
}

AdjointSolution solve_costate(const ControlProblem& prob, const Trajectory& x, const Trajectory& u,
                              const SolverConfig& cfg) {
  AdjointProblem ap{[&prob](double t, const Vector& state, const Vector& w, const Vector& lam) {
                      return hamiltonian_dx(prob, t, state, w, lam);
                    },
                    x, u, prob.dist, x.grid()};
  return solve_adjoint(ap, cfg);
}

double hamiltonian_residual(const ControlProblem& prob, const Trajectory& x, const Trajectory& u,
                            const Trajectory& lam, const SolverConfig& cfg) {
  require_same_grid(x, u, "hamiltonian_residual");
  require_same_grid(x, lam, "hamiltonian_residual");
  const std::vector<Vector> check = control_check_grid(prob.omega, cfg.control_grid);
  double residual = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x.grid()[i];
    const Vector xi = x.at(i);
    const Vector li = lam.at(i);
    const double current = hamiltonian(prob, t, xi, u.at(i), li);
    double best = -std::numeric_limits<double>::infinity();
    for (const Vector& w : check) best = std::max(best, hamiltonian(prob, t, xi, w, li));
    residual = std::max(residual, (best - current) / std::max(1.0, std::abs(current)));
  }
  return residual;
}

PMPSolution solve_pmp(const ControlProblem& prob, const SolverConfig& cfg) {
  cfg.validate();
  prob.validate();
  const TimeGrid grid(prob.a, prob.b, cfg.n_steps);
  const Vector start = prob.initial_control.value_or(prob.omega.midpoint());
  Trajectory u = Trajectory::constant(grid, start);

  struct Iterate {
    Trajectory x, u, lam;
    double cost;
    double transversality;
  };
  std::optional<Iterate> best;

  double gamma = cfg.gamma;
  double previous_cost = -std::numeric_limits<double>::infinity();
  int consecutive_decreases = 0;
  bool converged = false;
  double change = std::numeric_limits<double>::infinity();
  int sweeps = 0;

  Trajectory u_new(grid, prob.control_dim);
  for (sweeps = 1; sweeps <= cfg.max_sweeps; ++sweeps) {
    Trajectory x = solve_state(prob, u, cfg);
    const double cost = cost_functional(prob, x, u);
    AdjointSolution adj = solve_costate(prob, x, u, cfg);

    if (!best || cost > best->cost) best = Iterate{x, u, adj.adjoint, cost, adj.transversality_residual};
    const bool cost_dropped = cost < previous_cost;
    previous_cost = cost;

    for (std::size_t i = 0; i < grid.size(); ++i) {
      u_new.set(i, maximize_hamiltonian(prob, grid[i], x.at(i), adj.adjoint.at(i), cfg));
    }
    const double previous_change = change;
    change = (u_new.values() - u.values()).cwiseAbs().maxCoeff();
    if (change < cfg.sweep_tol) {
      converged = true;
      u = u_new;
      break;
    }
    // A falling J alone is not oscillation: the discrete fixed point may sit
    // slightly below an earlier iterate. Require the update to stall as well.
    if (cost_dropped && change >= previous_change) {
      if (++consecutive_decreases >= 2) {
        gamma *= 0.5;
        consecutive_decreases = 0;
      }
    } else {
      consecutive_decreases = 0;
    }
    u.values() = (1.0 - gamma) * u.values() + gamma * u_new.values();
  }

  if (converged) {
    Trajectory x = solve_state(prob, u, cfg);
    const double cost = cost_functional(prob, x, u);
    AdjointSolution adj = solve_costate(prob, x, u, cfg);
    best = Iterate{std::move(x), u, std::move(adj.adjoint), cost, adj.transversality_residual};
  } else {
    sweeps = cfg.max_sweeps;
  }

  PMPSolution sol{best->x, best->u, best->lam};
  sol.cost_value = best->cost;
  sol.sweep_iterations = sweeps;
  sol.converged = converged;
  sol.transversality_residual = best->transversality;
  sol.final_control_change = change;
  sol.final_gamma = gamma;
  sol.hamiltonian_residual = hamiltonian_residual(prob, sol.state, sol.control, sol.adjoint, cfg);
  return sol;
}

std::vector<double> switch_times(const Trajectory& u, const ControlBox& box, int component, double tol) {
  const double lo = box.lo[component];
  const double hi = box.hi[component];
  auto bound_of = [&](double value) {
    if (std::abs(value - lo) <= tol) return -1;
    if (std::abs(value - hi) <= tol) return 1;
    return 0;
  };
  std::vector<double> out;
  if (hi - lo <= tol) return out;
  for (std::size_t i = 1; i < u.size(); ++i) {
    const int before = bound_of(u(i - 1, component));
    const int after = bound_of(u(i, component));
    if (before != 0 && after != 0 && before != after) out.push_back(u.grid()[i]);
  }
  return out;
}

}  // namespace dofoc
