#pragma once

namespace dofoc::special {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
  double alpha;
  double beta = 1.0;
};

/// Gamma function. Throws DomainError at the poles 0, -1, -2, ...
double gamma_fn(double x);

/// 1/Gamma(x), an entire function: returns 0 at the poles instead of throwing.
double reciprocal_gamma(double x);

/// Real-argument Mittag-Leffler function
///
///     E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).
///
/// The power series is used whenever its rounding error estimate stays below
/// 1e-10 (absolute, or relative once |E| > 1). Large positive arguments with
/// alpha < 2 fall back to the exponential asymptotic expansion; large negative
/// arguments with alpha < 1 use the algebraic expansion, then (for
/// beta < 1 + alpha) a real-line integral representation. Anything else throws
/// AccuracyError carrying the best error estimate obtained.
double mittag_leffler(const MLParams& p, double z);

}  // namespace dofoc::special
