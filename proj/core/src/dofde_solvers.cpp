#include "dofoc/dofde_solvers.hpp"

#include "dofoc/errors.hpp"
#include "dofoc/fractional_operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dofoc {

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw ValidationError(std::string("solver config: ") + field + " must be positive");
  };
  if (n_steps < 2) throw ValidationError("solver config: n_steps must be at least 2");
  require(quad_order > 0, "quad_order");
  require(sweep_tol > 0.0, "sweep_tol");
  require(newton_tol > 0.0, "newton_tol");
  require(max_inner_iters > 0, "max_inner_iters");
  require(max_sweeps > 0, "max_sweeps");
  require(control_grid > 0, "control_grid");
  require(needle_tol > 0.0, "needle_tol");
  require(gamma > 0.0 && gamma <= 1.0, "gamma (and at most 1)");
}

namespace {

constexpr int kUndampedIterations = 20;
constexpr double kDamping = 0.5;

void require_finite(const Vector& v, std::size_t step, const char* who) {
  if (!v.allFinite()) {
    std::ostringstream os;
    os << who << ": right-hand side not finite at step " << step;
    throw DynamicsEvaluationError(os.str());
  }
}

// Marches sum_{k<n} kernel[n-1-k] (x_{k+1} - x_k) = rhs(n, x_n) for n = 1..N.
template <class Rhs>
SampleMatrix march_l1(const std::vector<double>& kernel, int n_steps, const Vector& start,
                      Rhs&& rhs, const SolverConfig& cfg, const char* who) {
  const Eigen::Index dim = start.size();
  SampleMatrix x(n_steps + 1, dim);
  Matrix dx(n_steps, dim);  // column-major: one contiguous history per component
  x.row(0) = start.transpose();
  const double k0 = kernel.front();

  Vector hist(dim);
  Vector prev(dim);
  Vector current(dim);
  Vector candidate(dim);
  for (int n = 1; n <= n_steps; ++n) {
    const auto step = static_cast<std::size_t>(n);
    for (Eigen::Index c = 0; c < dim; ++c) {
      double acc = 0.0;
      const double* col = dx.col(c).data();
      for (int k = 0; k + 1 < n; ++k) acc += kernel[static_cast<std::size_t>(n - 1 - k)] * col[k];
      hist[c] = acc;
    }
    prev = x.row(n - 1).transpose();
    current = prev;
    Vector f_current = rhs(n, current);
    require_finite(f_current, step, who);

    bool converged = false;
    for (int it = 0; it < cfg.max_inner_iters; ++it) {
      candidate = prev + (f_current - hist) / k0;
      if (it >= kUndampedIterations) candidate = kDamping * current + (1.0 - kDamping) * candidate;
      Vector f_candidate = rhs(n, candidate);
      require_finite(f_candidate, step, who);
      const double residual = (k0 * (candidate - prev) + hist - f_candidate).cwiseAbs().maxCoeff();
      const double scale = std::max({1.0, f_candidate.cwiseAbs().maxCoeff(), hist.cwiseAbs().maxCoeff()});
      current = candidate;
      f_current = std::move(f_candidate);
      if (residual <= cfg.newton_tol * scale) {
        converged = true;
        break;
      }
    }
    if (!converged || !current.allFinite()) {
      std::ostringstream os;
      os << who << ": implicit step " << n << " did not converge in " << cfg.max_inner_iters
         << " iterations";
      throw SolverDivergenceError(os.str(), step);
    }
    x.row(n) = current.transpose();
    dx.row(n - 1) = (current - prev).transpose();
  }
  return x;
}

}  // namespace

Trajectory solve_forward(const ForwardProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  if (!(p.control.grid() == p.grid)) {
    throw GridMismatchError("solve_forward: control grid does not match the solver grid");
  }
  if (!p.x0.allFinite()) throw ValidationError("solve_forward: initial state not finite");
  if (!p.rhs) throw ValidationError("solve_forward: missing right-hand side");

  const std::vector<double> kernel = l1_kernel(p.dist, p.grid.step(), p.grid.steps());
  auto rhs = [&](int n, const Vector& x) {
    const auto i = static_cast<std::size_t>(n);
    Vector f = p.rhs(p.grid[i], x, p.control.at(i));
    if (f.size() != x.size()) throw ValidationError("solve_forward: rhs has wrong dimension");
    return f;
  };
  return Trajectory(p.grid, march_l1(kernel, p.grid.steps(), p.x0, rhs, cfg, "solve_forward"));
}

AdjointSolution solve_adjoint(const AdjointProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  if (!(p.state.grid() == p.grid) || !(p.control.grid() == p.grid)) {
    throw GridMismatchError("solve_adjoint: state/control grid does not match the solver grid");
  }
  if (!p.rhs) throw ValidationError("solve_adjoint: missing right-hand side");

  const int n_steps = p.grid.steps();
  const std::vector<double> kernel = l1_kernel(p.dist, p.grid.step(), n_steps);
  const Vector terminal = Vector::Zero(p.state.dim());
  // Reversed time: marching index s corresponds to node N - s.
  auto rhs = [&](int s, const Vector& lam) {
    const auto i = static_cast<std::size_t>(n_steps - s);
    Vector g = p.rhs(p.grid[i], p.state.at(i), p.control.at(i), lam);
    if (g.size() != lam.size()) throw ValidationError("solve_adjoint: rhs has wrong dimension");
    return g;
  };
  SampleMatrix reversed = march_l1(kernel, n_steps, terminal, rhs, cfg, "solve_adjoint");

  AdjointSolution out{Trajectory(p.grid, reversed.colwise().reverse()), 0.0};
  const Trajectory integral = distributed_integral_right(out.adjoint, p.dist);
  const std::size_t near_end = integral.size() - 2;
  for (int c = 0; c < integral.dim(); ++c) {
    out.transversality_residual = std::max(out.transversality_residual, std::abs(integral(near_end, c)));
  }
  return out;
}

double residual_forward(const Trajectory& x, const ForwardProblem& p) {
  if (!(x.grid() == p.grid) || !(p.control.grid() == p.grid)) {
    throw GridMismatchError("residual_forward: grids do not match");
  }
  const Trajectory derivative = distributed_caputo_left(x, p.dist);
  double residual = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Vector f = p.rhs(p.grid[i], x.at(i), p.control.at(i));
    residual = std::max(residual, (derivative.at(i) - f).cwiseAbs().maxCoeff());
  }
  return residual;
}

}  // namespace dofoc
