#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dofoc {

/// Weight psi(alpha) >= 0 on [0, 1].
using OrderWeight = std::function<double(double)>;

/// Gauss-Legendre abscissae and weights mapped to [lo, hi].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(int order, double lo = 0.0, double hi = 1.0);

/// Distribution of the differentiation order together with its quadrature
/// discretization. A distributed-order operator int psi(alpha) Op^alpha d alpha
/// becomes the multi-term sum sum_j coefficient_j Op^{alpha_j}, where
/// coefficient_j = w_j psi(alpha_j).
class OrderDistribution {
 public:
  OrderDistribution(OrderWeight weight, std::vector<double> nodes, std::vector<double> weights);

  double weight(double alpha) const { return weight_(alpha); }
  const OrderWeight& weight_function() const noexcept { return weight_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// m = int_0^1 psi(alpha) d alpha by the same rule.
  double mass() const noexcept { return mass_; }

  double max_order() const noexcept;

 private:
  OrderWeight weight_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> coefficients_;
  double mass_;
};

/// Gauss-Legendre discretization of psi on (0, 1).
///
/// Throws ValidationError for quad_order < 2 or psi < 0 at a node and
/// DegenerateDistributionError when the mass is <= 1e-14.
OrderDistribution build_distribution(OrderWeight weight, int quad_order);

/// Same, with the rule restricted to the support [lo, hi] of psi. Used for
/// narrow weights that a rule over the whole unit interval would not see.
OrderDistribution build_distribution(OrderWeight weight, int quad_order, double lo, double hi);

/// Unit-mass bump of the given width around center, shaped like a Beta(2,2)
/// density and shifted so that its support stays inside [0, 1].
struct Bump {
  double center;
  double width;

  double lo() const noexcept;
  double hi() const noexcept { return lo() + width; }
  double operator()(double alpha) const noexcept;
};

OrderDistribution build_bump_distribution(const Bump& bump, int quad_order);

/// psi(alpha) = sum_k c_k alpha^k.
OrderWeight polynomial_weight(std::vector<double> coefficients);

}  // namespace dofoc
