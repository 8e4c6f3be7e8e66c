#pragma once

#include <functional>

namespace ttbayes::numerics {

/// ln Gamma(x) for x > 0. Relative error below 1e-13 on [0.05, 1e6], including
/// near the roots at x = 1 and x = 2.
double log_gamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta(double a, double b);

/// ln(1 + t^2 / (d e^s)) for d > 0, exact where t^2 is representable and
/// switching to 2 ln|t| - ln d - s where it overflows.
double log1p_square_ratio(double t, double d, double s = 0.0);

/// Regularized incomplete beta I_x(a, b), absolute error below 1e-12.
double regularized_incomplete_beta(double x, double a, double b);

/// As above, but the caller supplies 1 - x as well. Use this when 1 - x is
/// known more accurately than the subtraction would give (e.g. t^2/(v+t^2)).
double regularized_incomplete_beta(double x, double one_minus_x, double a,
                                   double b);

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  int max_refinement_levels = 12;

  /// Throws DomainError unless relative_tolerance > 0 and levels >= 1.
  void validate() const;
};

/// Integral of `f` over (0, inf) by the exp-sinh substitution
///
///   x = exp(pi/2 * sinh(s)),  dx = x * pi/2 * cosh(s) ds,
///
/// followed by trapezoidal sums with the step halved each level. Integrable
/// power-law singularities at 0 (x^p, p > -1) are absorbed by the double
/// exponential decay of the weights.
///
/// Throws ConvergenceError (carrying the best estimate and the last
/// difference between levels) when the tolerance is not met, and DomainError
/// when `f` returns a non-finite value.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec = {});

} // namespace ttbayes::numerics
