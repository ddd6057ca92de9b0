#include "dofoc/time_grid.hpp"

#include "dofoc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dofoc {

TimeGrid::TimeGrid(double a, double b, int n_steps) : a_(a), b_(b), n_steps_(n_steps), h_(0.0) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    std::ostringstream os;
    os << "time grid: need finite a < b, got [" << a << ", " << b << "]";
    throw ValidationError(os.str());
  }
  if (n_steps < 2) throw ValidationError("time grid: n_steps must be at least 2");
  h_ = (b - a) / n_steps;
}

std::size_t TimeGrid::nearest_index(double t) const noexcept {
  const double pos = std::round((t - a_) / h_);
  if (pos <= 0.0) return 0;
  if (pos >= n_steps_) return static_cast<std::size_t>(n_steps_);
  return static_cast<std::size_t>(pos);
}

Trajectory::Trajectory(const TimeGrid& grid, int dim)
    : grid_(grid), values_(SampleMatrix::Zero(static_cast<Eigen::Index>(grid.size()), dim)) {
  if (dim < 1) throw ValidationError("trajectory: dimension must be positive");
}

Trajectory::Trajectory(const TimeGrid& grid, SampleMatrix values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != static_cast<Eigen::Index>(grid_.size())) {
    std::ostringstream os;
    os << "trajectory: " << values_.rows() << " rows for " << grid_.size() << " grid nodes";
    throw ValidationError(os.str());
  }
  if (values_.cols() < 1) throw ValidationError("trajectory: dimension must be positive");
  if (!all_finite()) throw ValidationError("trajectory: non-finite sample");
}

Trajectory Trajectory::sample(const TimeGrid& grid, int dim,
                              const std::function<Vector(double)>& fn) {
  Trajectory out(grid, dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector v = fn(grid[i]);
    if (v.size() != dim) throw ValidationError("trajectory: sampled value has wrong dimension");
    out.set(i, v);
  }
  if (!out.all_finite()) throw ValidationError("trajectory: non-finite sample");
  return out;
}

Trajectory Trajectory::constant(const TimeGrid& grid, const Vector& value) {
  Trajectory out(grid, static_cast<int>(value.size()));
  out.values_.rowwise() = value.transpose();
  return out;
}

Trajectory Trajectory::reversed() const {
  Trajectory out(grid_, dim());
  out.values_ = values_.colwise().reverse();
  return out;
}

bool Trajectory::all_finite() const { return values_.allFinite(); }

double Trajectory::max_abs() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

void require_same_grid(const Trajectory& lhs, const Trajectory& rhs, const char* context) {
  if (!(lhs.grid() == rhs.grid())) {
    throw GridMismatchError(std::string(context) + ": trajectories live on different grids");
  }
}

double trapezoid(const Trajectory& f, int component) {
  const std::size_t n = f.size();
  double sum = 0.5 * (f(0, component) + f(n - 1, component));
  for (std::size_t i = 1; i + 1 < n; ++i) sum += f(i, component);
  return sum * f.grid().step();
}

double max_abs_difference(const Trajectory& lhs, const Trajectory& rhs, std::size_t first,
                          std::size_t last) {
  require_same_grid(lhs, rhs, "max_abs_difference");
  if (lhs.dim() != rhs.dim()) throw ValidationError("max_abs_difference: dimension mismatch");
  last = std::min(last, lhs.size());
  double out = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    for (int k = 0; k < lhs.dim(); ++k) out = std::max(out, std::abs(lhs(i, k) - rhs(i, k)));
  }
  return out;
}

}  // namespace dofoc
