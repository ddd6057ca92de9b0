#include "dofoc/special_functions.hpp"

#include "dofoc/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace dofoc::special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTargetAccuracy = 1e-10;
constexpr int kMaxSeriesTerms = 500;
constexpr int kMaxAsymptoticTerms = 200;

bool is_non_positive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

struct Estimate {
  double value;
  double error;
};

// Accuracy goal: absolute below |E| = 1, relative above.
bool acceptable(const Estimate& e) {
  return std::isfinite(e.value) && e.error <= kTargetAccuracy * std::max(1.0, std::abs(e.value));
}

// |z|^k / Gamma(alpha k + beta) with its sign, evaluated in log space so that
// neither factor overflows on its own.
double series_term(double abs_z, double z_sign, int k, double alpha, double beta) {
  const double arg = alpha * k + beta;
  if (is_non_positive_integer(arg)) return 0.0;
  const double sign_k = (z_sign < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
  if (arg < 170.0 && k < 60) return sign_k * std::pow(abs_z, k) * reciprocal_gamma(arg);
  double gamma_sign = 1.0;
  if (arg < 0.0 && static_cast<long long>(std::floor(arg)) % 2 != 0) gamma_sign = -1.0;
  return sign_k * gamma_sign * std::exp(k * std::log(abs_z) - std::lgamma(arg));
}

Estimate power_series(double alpha, double beta, double z) {
  if (z == 0.0) return {reciprocal_gamma(beta), 0.0};
  const double abs_z = std::abs(z);
  const double z_sign = z < 0.0 ? -1.0 : 1.0;

  double sum = 0.0;
  double compensation = 0.0;
  double abs_sum = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double term = series_term(abs_z, z_sign, k, alpha, beta);
    if (!std::isfinite(term)) return {term, std::numeric_limits<double>::infinity()};
    // Kahan summation
    const double y = term - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
    abs_sum += std::abs(term);

    const double next_bound = std::abs(term);
    if (k > 0 && next_bound < previous && next_bound < 1e-16 * std::abs(sum)) {
      return {sum, 4.0 * kEps * abs_sum};
    }
    if (k > 0 && term == 0.0 && previous == 0.0) return {sum, 4.0 * kEps * abs_sum};
    previous = next_bound;
  }
  // Truncated at the term cap: the last term bounds the tail only loosely.
  return {sum, 4.0 * kEps * abs_sum + previous * 10.0};
}

// Algebraic part -sum_{k>=1} z^{-k} / Gamma(beta - alpha k), truncated at its
// smallest term. Returns the smallest omitted term as the error.
Estimate algebraic_tail(double alpha, double beta, double z) {
  double sum = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  double zk = 1.0;
  for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
    zk /= z;
    const double term = -zk * reciprocal_gamma(beta - alpha * k);
    const double magnitude = std::abs(term);
    if (magnitude > smallest && magnitude > 0.0) return {sum, smallest};
    if (magnitude > 0.0) smallest = magnitude;
    if (magnitude == 0.0 && std::abs(zk) < 1e-300) return {sum, 0.0};
    sum += term;
  }
  return {sum, smallest};
}

Estimate asymptotic_positive(double alpha, double beta, double z) {
  const double root = std::pow(z, 1.0 / alpha);
  if (root > 709.0) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double leading = std::pow(z, (1.0 - beta) / alpha) * std::exp(root) / alpha;
  const Estimate tail = algebraic_tail(alpha, beta, z);
  return {leading + tail.value, tail.error + 4.0 * kEps * std::abs(leading)};
}

// Real-line integral for 0 < alpha < 1, beta < 1 + alpha, z < 0:
//   E = 1/(alpha pi) int_0^inf chi^{(1-beta)/alpha} exp(-chi^{1/alpha})
//       [chi sin(pi(1-beta)) - z sin(pi(1-beta+alpha))]
//       / (chi^2 - 2 chi z cos(pi alpha) + z^2) d chi,
// truncated where exp(-chi^{1/alpha}) drops below e^{-745} and split at
// chi = |z|, where the denominator nearly vanishes for alpha close to 1.
Estimate integral_negative(double alpha, double beta, double z) {
  using std::numbers::pi;
  const double s1 = std::sin(pi * (1.0 - beta));
  const double s2 = std::sin(pi * (1.0 - beta + alpha));
  const double c = std::cos(pi * alpha);
  auto integrand = [=](double chi) {
    if (chi <= 0.0) return 0.0;
    return std::pow(chi, (1.0 - beta) / alpha) * std::exp(-std::pow(chi, 1.0 / alpha)) * (chi * s1 - z * s2) /
           (chi * chi - 2.0 * chi * z * c + z * z);
  };
  boost::math::quadrature::tanh_sinh<double> rule;
  const double upper = std::pow(745.0, alpha);
  std::vector<double> cuts{0.0};
  if (-z < upper) cuts.push_back(-z);
  cuts.push_back(upper);
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double piece_error = 0.0;
    double l1 = 0.0;
    value += rule.integrate(integrand, cuts[i], cuts[i + 1], 1e-14, &piece_error, &l1);
    error += piece_error + 8.0 * kEps * l1;
  }
  const double scale = 1.0 / (alpha * pi);
  return {value * scale, error * scale};
}

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
  if (is_non_positive_integer(x)) {
    std::ostringstream os;
    os << "gamma_fn: pole at x = " << x;
    throw DomainError(os.str());
  }
  return std::tgamma(x);
}

double reciprocal_gamma(double x) {
  if (is_non_positive_integer(x)) return 0.0;
  if (x > 171.6) return 0.0;
  if (x < 0.5) {
    // Reflection keeps large negative arguments away from tgamma underflow.
    const double s = std::sin(std::numbers::pi * x);
    return s * std::tgamma(1.0 - x) / std::numbers::pi;
  }
  return 1.0 / std::tgamma(x);
}

double mittag_leffler(const MLParams& p, double z) {
  if (!(p.alpha > 0.0)) throw DomainError("mittag_leffler: alpha must be positive");
  if (!std::isfinite(z)) throw DomainError("mittag_leffler: non-finite argument");

  const Estimate series = power_series(p.alpha, p.beta, z);
  if (acceptable(series)) return series.value;

  Estimate best = series;
  if (z > 0.0 && p.alpha < 2.0) {
    const Estimate asym = asymptotic_positive(p.alpha, p.beta, z);
    if (acceptable(asym)) return asym.value;
    if (asym.error < best.error) best = asym;
  } else if (z < 0.0 && p.alpha < 1.0) {
    const Estimate asym = algebraic_tail(p.alpha, p.beta, z);
    if (acceptable(asym)) return asym.value;
    if (asym.error < best.error) best = asym;
    // beta >= 1 + alpha steps down by E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
    int shifts = 0;
    double beta = p.beta;
    while (beta >= 1.0 + p.alpha) {
      beta -= p.alpha;
      ++shifts;
    }
    if (shifts == 0 || z <= -1.0) {
      Estimate quad = integral_negative(p.alpha, beta, z);
      for (int k = 0; k < shifts; ++k) {
        beta += p.alpha;
        const double shifted = reciprocal_gamma(beta - p.alpha);
        quad = {(quad.value - shifted) / z,
                (quad.error + 2.0 * kEps * (std::abs(quad.value) + std::abs(shifted))) / std::abs(z)};
      }
      if (acceptable(quad)) return quad.value;
      if (quad.error < best.error) best = quad;
    }
  } else if (z < 0.0 && p.alpha == 1.0 && p.beta == 1.0) {
    return std::exp(z);
  }

  std::ostringstream os;
  os << "mittag_leffler: accuracy target not reached for alpha=" << p.alpha << " beta=" << p.beta
     << " z=" << z << " (estimated error " << best.error << ")";
  throw AccuracyError(os.str(), best.error);
}

}  // namespace dofoc::special
