#include "dofoc/control_problem.hpp"

#include "dofoc/errors.hpp"

#include <cmath>
#include <sstream>

namespace dofoc {

bool ControlBox::contains(const Vector& u, double tol) const {
  if (u.size() != lo.size()) return false;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u[k] < lo[k] - tol || u[k] > hi[k] + tol) return false;
  }
  return true;
}

Vector ControlBox::clamp(const Vector& u) const { return u.cwiseMax(lo).cwiseMin(hi); }

void ControlProblem::validate() const {
  if (state_dim < 1 || control_dim < 1) throw ValidationError("control problem: dimensions must be positive");
  if (!dynamics) throw ValidationError("control problem: missing dynamics");
  if (!cost) throw ValidationError("control problem: missing cost");
  if (x0.size() != state_dim) throw ValidationError("control problem: initial state has wrong dimension");
  if (!x0.allFinite()) throw ValidationError("control problem: initial state not finite");
  if (omega.lo.size() != control_dim || omega.hi.size() != control_dim) {
    throw ValidationError("control problem: omega has wrong dimension");
  }
  for (int k = 0; k < control_dim; ++k) {
    if (!std::isfinite(omega.lo[k]) || !std::isfinite(omega.hi[k]) || omega.lo[k] > omega.hi[k]) {
      std::ostringstream os;
      os << "control problem: omega component " << k << " needs finite lo <= hi";
      throw ValidationError(os.str());
    }
  }
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw ValidationError("control problem: horizon must satisfy a < b");
  }
  if (initial_control && (initial_control->size() != control_dim || !omega.contains(*initial_control))) {
    throw ValidationError("control problem: initial control outside omega");
  }
}

Vector ControlProblem::eval_dynamics(double t, const Vector& x, const Vector& u) const {
  Vector f = dynamics(t, x, u);
  if (f.size() != state_dim) throw ValidationError("control problem: dynamics returned wrong dimension");
  if (!f.allFinite()) throw DynamicsEvaluationError("control problem: dynamics not finite");
  return f;
}

double ControlProblem::eval_cost(double t, const Vector& x, const Vector& u) const {
  const double value = cost(t, x, u);
  if (!std::isfinite(value)) throw DynamicsEvaluationError("control problem: running cost not finite");
  return value;
}

Matrix ControlProblem::eval_dynamics_dx(double t, const Vector& x, const Vector& u) const {
  if (dynamics_dx) {
    Matrix jac = dynamics_dx(t, x, u);
    if (jac.rows() != state_dim || jac.cols() != state_dim) {
      throw ValidationError("control problem: dynamics_dx returned wrong shape");
    }
    if (!jac.allFinite()) throw DynamicsEvaluationError("control problem: dynamics_dx not finite");
    return jac;
  }
  Matrix jac(state_dim, state_dim);
  Vector probe = x;
  for (int k = 0; k < state_dim; ++k) {
    const double step = kFiniteDifferenceStep * std::max(1.0, std::abs(x[k]));
    probe[k] = x[k] + step;
    const Vector plus = eval_dynamics(t, probe, u);
    probe[k] = x[k] - step;
    const Vector minus = eval_dynamics(t, probe, u);
    probe[k] = x[k];
    jac.col(k) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

Vector ControlProblem::eval_cost_dx(double t, const Vector& x, const Vector& u) const {
  if (cost_dx) {
    Vector grad = cost_dx(t, x, u);
    if (grad.size() != state_dim) throw ValidationError("control problem: cost_dx returned wrong dimension");
    if (!grad.allFinite()) throw DynamicsEvaluationError("control problem: cost_dx not finite");
    return grad;
  }
  Vector grad(state_dim);
  Vector probe = x;
  for (int k = 0; k < state_dim; ++k) {
    const double step = kFiniteDifferenceStep * std::max(1.0, std::abs(x[k]));
    probe[k] = x[k] + step;
    const double plus = eval_cost(t, probe, u);
    probe[k] = x[k] - step;
    const double minus = eval_cost(t, probe, u);
    probe[k] = x[k];
    grad[k] = (plus - minus) / (2.0 * step);
  }
  return grad;
}

}  // namespace dofoc
