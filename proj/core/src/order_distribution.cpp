#include "dofoc/order_distribution.hpp"

#include "dofoc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dofoc {

QuadratureRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw ValidationError("gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x > 0 here; store ascending.
    const auto lo_idx = static_cast<std::size_t>(i);
    const auto hi_idx = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo_idx] = mid - half * x;
    rule.nodes[hi_idx] = mid + half * x;
    rule.weights[lo_idx] = half * w;
    rule.weights[hi_idx] = half * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = mid;
  return rule;
}

OrderDistribution::OrderDistribution(OrderWeight weight, std::vector<double> nodes,
                                     std::vector<double> weights)
    : weight_(std::move(weight)), nodes_(std::move(nodes)), weights_(std::move(weights)), mass_(0.0) {
  if (!weight_) throw ValidationError("order distribution: empty weight function");
  if (nodes_.size() != weights_.size() || nodes_.empty()) {
    throw ValidationError("order distribution: nodes and weights must be non-empty and match");
  }
  coefficients_.reserve(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double alpha = nodes_[j];
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ValidationError("order distribution: quadrature nodes must lie in (0, 1)");
    }
    if (!(weights_[j] > 0.0)) throw ValidationError("order distribution: weights must be positive");
    const double psi = weight_(alpha);
    if (!std::isfinite(psi) || psi < 0.0) {
      std::ostringstream os;
      os << "order distribution: psi(" << alpha << ") = " << psi << " is negative or not finite";
      throw ValidationError(os.str());
    }
    coefficients_.push_back(weights_[j] * psi);
    mass_ += coefficients_.back();
  }
  if (!(mass_ > 1e-14)) {
    throw DegenerateDistributionError("order distribution: mass int psi is not positive");
  }
}

double OrderDistribution::max_order() const noexcept {
  double out = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (coefficients_[j] > 0.0) out = std::max(out, nodes_[j]);
  }
  return out;
}

OrderDistribution build_distribution(OrderWeight weight, int quad_order) {
  return build_distribution(std::move(weight), quad_order, 0.0, 1.0);
}

OrderDistribution build_distribution(OrderWeight weight, int quad_order, double lo, double hi) {
  if (quad_order < 2) throw ValidationError("order distribution: quad_order must be at least 2");
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) {
    throw ValidationError("order distribution: support must satisfy 0 <= lo < hi <= 1");
  }
  QuadratureRule rule = gauss_legendre(quad_order, lo, hi);
  return OrderDistribution(std::move(weight), std::move(rule.nodes), std::move(rule.weights));
}

double Bump::lo() const noexcept { return std::clamp(center - 0.5 * width, 0.0, 1.0 - width); }

double Bump::operator()(double alpha) const noexcept {
  const double s = (alpha - lo()) / width;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 6.0 * s * (1.0 - s) / width;
}

OrderDistribution build_bump_distribution(const Bump& bump, int quad_order) {
  if (!(bump.width > 0.0 && bump.width <= 1.0)) {
    throw ValidationError("bump distribution: width must lie in (0, 1]");
  }
  if (!(bump.center >= 0.0 && bump.center <= 1.0)) {
    throw ValidationError("bump distribution: center must lie in [0, 1]");
  }
  return build_distribution(bump, quad_order, bump.lo(), bump.hi());
}

OrderWeight polynomial_weight(std::vector<double> coefficients) {
  return [c = std::move(coefficients)](double alpha) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * alpha + *it;
    return acc;
  };
}

}  // namespace dofoc
