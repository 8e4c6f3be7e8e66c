#include "ttbayes/numerics.hpp"

#include "ttbayes/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace ttbayes::numerics {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr int kZetaTerms = 64;

// zeta(k) - 1 for k = 2..kZetaTerms, by Euler-Maclaurin summation of
// sum_{n>=2} n^{-k} with the tail started at n = 16.
std::array<long double, kZetaTerms + 1> make_zeta_minus_one() {
  std::array<long double, kZetaTerms + 1> out{};
  constexpr int cut = 16;
  // B_{2j} / (2j)!
  constexpr std::array<long double, 5> bernoulli_over_factorial = {
      1.0L / 12.0L, -1.0L / 720.0L, 1.0L / 30240.0L, -1.0L / 1209600.0L,
      1.0L / 47900160.0L};
  for (int k = 2; k <= kZetaTerms; ++k) {
    long double sum = 0.0L;
    for (int n = cut - 1; n >= 2; --n) {
      sum += std::pow(static_cast<long double>(n), -static_cast<long double>(k));
    }
    const long double m = cut;
    sum += std::pow(m, 1.0L - k) / (k - 1);
    sum += 0.5L * std::pow(m, -static_cast<long double>(k));
    long double rising = k; // k (k+1) ... (k+2j-2)
    for (std::size_t j = 0; j < bernoulli_over_factorial.size(); ++j) {
      sum += bernoulli_over_factorial[j] * rising *
             std::pow(m, -static_cast<long double>(k) - 2.0L * j - 1.0L);
      rising *= static_cast<long double>(k + 2 * j + 1) * (k + 2 * j + 2);
    }
    out[k] = sum;
  }
  return out;
}

const std::array<long double, kZetaTerms + 1>& zeta_minus_one() {
  static const auto table = make_zeta_minus_one();
  return table;
}

// ln Gamma(2 + z) = (1 - gamma) z + sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k,
// convergent for |z| < 2; used here with |z| <= 1/2.
double log_gamma_two_plus(double z) {
  const auto& zm1 = zeta_minus_one();
  long double zl = z;
  long double power = -zl; // (-z)^k after the first multiply
  long double sum = (1.0L - kEulerGamma) * zl;
  for (int k = 2; k <= kZetaTerms; ++k) {
    power *= -zl;
    const long double term = zm1[k] * power / k;
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum)) {
      break;
    }
  }
  return static_cast<double>(sum);
}

// ln Gamma(1 + z) = ln Gamma(2 + z) - ln(1 + z).
double log_gamma_one_plus(double z) {
  return log_gamma_two_plus(z) - std::log1p(z);
}

double stirling(double x) {
  constexpr std::array<double, 8> coef = {
      1.0 / 12.0,   -1.0 / 360.0,          1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0, -691.0 / 360360.0,     1.0 / 156.0,  -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : coef) {
    series += c * power;
    power *= inv2;
  }
  return (x - 0.5) * std::log(x) - x +
         0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iterations = 20000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) {
    d = tiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) {
      d = tiny;
    }
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) {
      d = tiny;
    }
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) {
      return h;
    }
  }
  std::ostringstream msg;
  msg << "incomplete beta continued fraction did not converge for x=" << x
      << ", a=" << a << ", b=" << b;
  throw ConvergenceError(msg.str(), h, std::numeric_limits<double>::quiet_NaN());
}

} // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(x));
  }
  if (x < 0.5) {
    return log_gamma_one_plus(x) - std::log(x);
  }
  if (x < 1.5) {
    return log_gamma_one_plus(x - 1.0);
  }
  if (x < 2.5) {
    return log_gamma_two_plus(x - 2.0);
  }
  if (x < 10.0) {
    // Step down into [1.5, 2.5): Gamma(x) = (x-1)(x-2)...(x-m) Gamma(x-m).
    double y = x;
    double product = 1.0;
    while (y >= 2.5) {
      y -= 1.0;
      product *= y;
    }
    return log_gamma_two_plus(y - 2.0) + std::log(product);
  }
  return stirling(x);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("log_beta: both arguments must be positive");
  }
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log1p_square_ratio(double t, double d, double s) {
  const double t2 = t * t;
  if (std::isfinite(t2)) {
    return std::log1p(t2 / d * std::exp(-s));
  }
  const double log_q = 2.0 * std::log(std::fabs(t)) - std::log(d) - s;
  return log_q > 0.0 ? log_q + std::log1p(std::exp(-log_q))
                     : std::log1p(std::exp(log_q));
}

double regularized_incomplete_beta(double x, double a, double b) {
  return regularized_incomplete_beta(x, 1.0 - x, a, b);
}

double regularized_incomplete_beta(double x, double one_minus_x, double a,
                                   double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(one_minus_x >= 0.0 && one_minus_x <= 1.0)) {
    throw DomainError("regularized_incomplete_beta: x must lie in [0, 1]");
  }
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError(
        "regularized_incomplete_beta: shape parameters must be positive");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (one_minus_x == 0.0) {
    return 1.0;
  }
  const double log_front =
      a * std::log(x) + b * std::log(one_minus_x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(one_minus_x, b, a) / b;
}

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0)) {
    throw DomainError("QuadratureSpec: relative_tolerance must be positive");
  }
  if (max_refinement_levels < 1) {
    throw DomainError("QuadratureSpec: max_refinement_levels must be >= 1");
  }
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec) {
  spec.validate();

  // exp(pi/2 sinh(6.5)) ~ 1e226 keeps both abscissae and weights in range.
  constexpr double half_width = 6.5;
  constexpr double initial_step = 0.5;
  constexpr double half_pi = std::numbers::pi / 2.0;

  auto term = [&](double s) {
    const double x = std::exp(half_pi * std::sinh(s));
    const double weight = half_pi * std::cosh(s) * x;
    if (x == 0.0 || weight == 0.0 || !std::isfinite(x)) {
      return 0.0;
    }
    const double value = f(x);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "integrate_semi_infinite: integrand is not finite at x=" << x;
      throw DomainError(msg.str());
    }
    return weight * value;
  };

  double step = initial_step;
  const int initial_points = static_cast<int>(half_width / initial_step);
  double sum = 0.0;
  for (int i = -initial_points; i <= initial_points; ++i) {
    sum += term(i * step);
  }
  const double end_terms =
      std::fabs(term(-half_width)) + std::fabs(term(half_width));
  double estimate = sum * step;
  double difference = std::numeric_limits<double>::infinity();

  for (int level = 1; level <= spec.max_refinement_levels; ++level) {
    step *= 0.5;
    const int odd_points = initial_points << level;
    for (int i = -odd_points + 1; i < odd_points; i += 2) {
      sum += term(i * step);
    }
    const double refined = sum * step;
    difference = std::fabs(refined - estimate);
    estimate = refined;
    const double bound = std::max(difference, end_terms * step);
    if (level >= 2 && bound <= spec.relative_tolerance * std::fabs(estimate)) {
      return estimate;
    }
    if (level >= 2 && estimate == 0.0 && bound == 0.0) {
      return estimate;
    }
  }
  std::ostringstream msg;
  msg << "integrate_semi_infinite: relative tolerance "
      << spec.relative_tolerance << " not reached within "
      << spec.max_refinement_levels << " refinement levels (estimate "
      << estimate << ", last change " << difference << ")";
  throw ConvergenceError(msg.str(), estimate, std::max(difference, end_terms));
}

} // namespace ttbayes::numerics
