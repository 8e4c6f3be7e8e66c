#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace ttbayes {

/// Count, mean and unbiased (n - 1 divisor) variance of one group.
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;

  /// Builds a summary from published moments, checking n >= 1 and a finite,
  /// non-negative variance. Throws DomainError otherwise.
  static SampleSummary from_moments(std::size_t n, double mean, double variance);
};

/// Pooled-variance two-sample t-test.
struct TwoSampleTest {
  double t = 0.0;
  int v = 0;              // degrees of freedom, n1 + n2 - 2
  double n_delta = 0.0;   // effective sample size (1/n1 + 1/n2)^-1
  std::optional<double> s_p2; // absent when built from a published t alone

  /// Test from a reported t-statistic and the two group sizes.
  static TwoSampleTest from_t(double t, std::size_t n1, std::size_t n2);
};

struct FrequentistResult {
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject_h0 = false;
};

/// Throws DomainError on an empty list and DataError on a non-finite value.
SampleSummary summarize(std::span<const double> observations);

/// (1/n1 + 1/n2)^-1.
double effective_sample_size(std::size_t n1, std::size_t n2);

/// Throws InsufficientDataError when n1 + n2 < 3 and DegenerateDataError when
/// the pooled variance is zero.
TwoSampleTest pooled_t(const SampleSummary& s1, const SampleSummary& s2);

/// 2 P(T_v >= |t|) = I_{v/(v+t^2)}(v/2, 1/2).
double two_sided_p_value(double t, int v);

FrequentistResult two_sided_p_value(const TwoSampleTest& test,
                                    double alpha = 0.05);

} // namespace ttbayes
