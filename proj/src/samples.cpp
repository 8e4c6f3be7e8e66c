#include "ttbayes/samples.hpp"

#include "ttbayes/errors.hpp"
#include "ttbayes/numerics.hpp"

#include <cmath>
#include <string>

namespace ttbayes {

SampleSummary SampleSummary::from_moments(std::size_t n, double mean,
                                          double variance) {
  if (n < 1) {
    throw DomainError("sample summary needs n >= 1");
  }
  if (!std::isfinite(mean)) {
    throw DomainError("sample mean must be finite");
  }
  if (!std::isfinite(variance) || variance < 0.0) {
    throw DomainError("sample variance must be finite and non-negative");
  }
  if (n == 1 && variance != 0.0) {
    throw DomainError("a single observation has zero sample variance");
  }
  return SampleSummary{n, mean, variance};
}

TwoSampleTest TwoSampleTest::from_t(double t, std::size_t n1, std::size_t n2) {
  if (!std::isfinite(t)) {
    throw DomainError("t-statistic must be finite");
  }
  if (n1 < 1 || n2 < 1) {
    throw InsufficientDataError("each group needs at least one observation");
  }
  if (n1 + n2 < 3) {
    throw InsufficientDataError(
        "n1 + n2 must be at least 3 for a positive degree of freedom");
  }
  return TwoSampleTest{t, static_cast<int>(n1 + n2 - 2),
                       effective_sample_size(n1, n2), std::nullopt};
}

SampleSummary summarize(std::span<const double> observations) {
  if (observations.empty()) {
    throw DomainError("cannot summarize an empty sample");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (!std::isfinite(observations[i])) {
      throw DataError("observation " + std::to_string(i + 1) +
                      " is not a finite number");
    }
    sum += observations[i];
  }
  const auto n = observations.size();
  const double mean = sum / static_cast<double>(n);
  // Two-pass with the compensating term of the corrected algorithm.
  double squares = 0.0;
  double residual = 0.0;
  for (double y : observations) {
    const double d = y - mean;
    squares += d * d;
    residual += d;
  }
  double variance = 0.0;
  if (n > 1) {
    variance = (squares - residual * residual / static_cast<double>(n)) /
               static_cast<double>(n - 1);
    variance = std::max(variance, 0.0);
  }
  return SampleSummary{n, mean, variance};
}

double effective_sample_size(std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return a * b / (a + b);
}

TwoSampleTest pooled_t(const SampleSummary& s1, const SampleSummary& s2) {
  if (s1.n < 1 || s2.n < 1 || s1.n + s2.n < 3) {
    throw InsufficientDataError(
        "pooled t-test needs n1 + n2 >= 3 with both groups nonempty (got n1=" +
        std::to_string(s1.n) + ", n2=" + std::to_string(s2.n) + ")");
  }
  const double dof = static_cast<double>(s1.n + s2.n - 2);
  const double s_p2 = ((static_cast<double>(s1.n) - 1.0) * s1.variance +
                       (static_cast<double>(s2.n) - 1.0) * s2.variance) /
                      dof;
  if (!(s_p2 > 0.0)) {
    throw DegenerateDataError(
        "pooled variance is zero (all observations equal within each group); "
        "the t-statistic is undefined");
  }
  const double n_delta = effective_sample_size(s1.n, s2.n);
  const double t = (s1.mean - s2.mean) / std::sqrt(s_p2 / n_delta);
  return TwoSampleTest{t, static_cast<int>(s1.n + s2.n - 2), n_delta, s_p2};
}

double two_sided_p_value(double t, int v) {
  if (v < 1) {
    throw DomainError("degrees of freedom must be at least 1");
  }
  if (!std::isfinite(t)) {
    throw DomainError("t-statistic must be finite");
  }
  const double dof = v;
  const double t2 = t * t;
  if (!std::isfinite(t2)) {
    return 0.0; // below the smallest double long before t^2 overflows
  }
  const double denom = dof + t2;
  return numerics::regularized_incomplete_beta(dof / denom, t2 / denom,
                                               0.5 * dof, 0.5);
}

FrequentistResult two_sided_p_value(const TwoSampleTest& test, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("significance level alpha must lie in (0, 1)");
  }
  const double p = two_sided_p_value(test.t, test.v);
  return FrequentistResult{p, alpha, p < alpha};
}

} // namespace ttbayes
