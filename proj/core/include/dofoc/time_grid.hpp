#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>

namespace dofoc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Node-major storage: row i holds the sample at t_i.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform grid t_i = a + i (b - a) / n_steps, i = 0 .. n_steps.
class TimeGrid {
 public:
  TimeGrid(double a, double b, int n_steps);

  double start() const noexcept { return a_; }
  double end() const noexcept { return b_; }
  int steps() const noexcept { return n_steps_; }
  double step() const noexcept { return h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_steps_) + 1; }

  /// The last node is b exactly.
  double operator[](std::size_t i) const noexcept {
    return static_cast<int>(i) == n_steps_ ? b_ : a_ + static_cast<double>(i) * h_;
  }

  /// Index of the node closest to t (clamped to the grid).
  std::size_t nearest_index(double t) const noexcept;

  bool operator==(const TimeGrid& other) const noexcept {
    return a_ == other.a_ && b_ == other.b_ && n_steps_ == other.n_steps_;
  }

 private:
  double a_;
  double b_;
  int n_steps_;
  double h_;
};

/// Vector-valued function sampled on a TimeGrid.
class Trajectory {
 public:
  /// Zero trajectory.
  Trajectory(const TimeGrid& grid, int dim);
  /// Throws ValidationError unless rows == grid.size() and all entries are finite.
  Trajectory(const TimeGrid& grid, SampleMatrix values);

  static Trajectory sample(const TimeGrid& grid, int dim,
                           const std::function<Vector(double)>& fn);
  static Trajectory constant(const TimeGrid& grid, const Vector& value);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return static_cast<int>(values_.cols()); }
  std::size_t size() const noexcept { return grid_.size(); }

  const SampleMatrix& values() const noexcept { return values_; }
  SampleMatrix& values() noexcept { return values_; }

  double operator()(std::size_t i, int k) const { return values_(static_cast<Eigen::Index>(i), k); }
  double& operator()(std::size_t i, int k) { return values_(static_cast<Eigen::Index>(i), k); }

  Vector at(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)).transpose(); }
  void set(std::size_t i, const Vector& v) { values_.row(static_cast<Eigen::Index>(i)) = v.transpose(); }

  /// Samples in reverse node order on the same grid (t -> a + b - t).
  Trajectory reversed() const;

  bool all_finite() const;

  /// Largest absolute entry.
  double max_abs() const;

 private:
  TimeGrid grid_;
  SampleMatrix values_;
};

/// Throws GridMismatchError when the grids differ.
void require_same_grid(const Trajectory& lhs, const Trajectory& rhs, const char* context);

/// Composite trapezoid rule of one component over the whole grid.
double trapezoid(const Trajectory& f, int component = 0);

/// Max-norm of lhs - rhs over nodes [first, last).
double max_abs_difference(const Trajectory& lhs, const Trajectory& rhs, std::size_t first = 0,
                          std::size_t last = static_cast<std::size_t>(-1));

}  // namespace dofoc
