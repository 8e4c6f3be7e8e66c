#pragma once

#include "ttbayes/numerics.hpp"
#include "ttbayes/samples.hpp"

#include <cmath>
#include <string_view>

namespace ttbayes {

/// Normal prior on the standardized effect, delta/sigma ~ N(lambda, sigma_a^2).
/// Only lambda = 0 is supported.
struct GbfConfig {
  double sigma_a2 = 1.0 / 9.0;
  double lambda = 0.0;

  static GbfConfig from_sigma_a(double sigma_a);
  void validate() const;
};

/// Pearson type VI hyper-prior on sigma_a^2 with scale kappa = n_delta and
/// second shape b = (v + 1)/2 - a - 5/2. Only `a` is free.
struct PbfConfig {
  double a = -0.75;

  double b(int v) const { return (v + 1) / 2.0 - a - 2.5; }
  static double kappa(const TwoSampleTest& test) { return test.n_delta; }

  /// Throws HyperparameterError unless -1 < a < v/2 - 1.
  void validate(int v) const;
};

/// Recommended shape band for the hyper-prior, (-1, -1/2].
constexpr double kRecommendedShapeLower = -1.0;
constexpr double kRecommendedShapeUpper = -0.5;

enum class JeffreysCategory { DecisiveH0, StrongH0, LeansH0, LeansH1 };

std::string_view label(JeffreysCategory category);

/// Bayes factor BF[H1:H0] with the posterior it implies. The log form is
/// authoritative; bf_10 is +inf once exp(log_bf_10) overflows.
struct BayesResult {
  double log_bf_10 = 0.0;
  double bf_10 = 1.0;
  double posterior_h1 = 0.5;
  double pi0 = 0.5;
  double pi1 = 0.5;
  JeffreysCategory jeffreys = JeffreysCategory::LeansH0;
};

/// ln GBF[H1:H0](sigma_a^2):
///   (v+1)/2 [ln(1 + t^2/v) - ln(1 + t^2/(v(1 + n_delta sigma_a^2)))]
///   - 1/2 ln(1 + n_delta sigma_a^2).
double log_gbf(const TwoSampleTest& test, const GbfConfig& config);

/// Closed-form PBF with the gamma-function constant hoisted out, for callers
/// that evaluate many t-statistics at one (v, a).
class PbfClosedForm {
public:
  PbfClosedForm(int v, const PbfConfig& config);

  double log_bf(double t) const {
    return log_constant_ + exponent_ * numerics::log1p_square_ratio(t, dof_);
  }

  double log_constant() const { return log_constant_; }
  double exponent() const { return exponent_; }

private:
  double dof_;
  double log_constant_;
  double exponent_;
};

/// ln PBF[H1:H0] = ln Gamma(v/2) + ln Gamma(a + 3/2) - ln Gamma((v+1)/2)
///                 - ln Gamma(a + 1) + (v - 2a - 2)/2 ln(1 + t^2/v).
double log_pbf(const TwoSampleTest& test, const PbfConfig& config);

/// ln of the Pearson type VI density
///   kappa (kappa x)^b (1 + kappa x)^(-a-b-2) / B(a+1, b+1).
double pearson_vi_log_pdf(double x, double a, double b, double kappa);

/// P(X > threshold) under Pearson VI. kappa X / (1 + kappa X) is
/// Beta(b + 1, a + 1), so this is an incomplete beta tail.
double pearson_vi_upper_tail(double threshold, double a, double b,
                             double kappa);

/// ln PBF obtained by integrating GBF(sigma_a^2) against the hyper-prior over
/// sigma_a^2 in (0, inf). Independent of the closed form; used to check it.
double log_pbf_quadrature(const TwoSampleTest& test, const PbfConfig& config,
                          const numerics::QuadratureSpec& spec = {});

/// Posterior P(H1 | Y) = [1 + (pi0/pi1) / BF]^-1, evaluated as a logistic
/// function of log BF + ln(pi1/pi0) so it stays exact for extreme log BF.
BayesResult posterior_probability(double log_bf_10, double pi0 = 0.5,
                                  double pi1 = 0.5);

/// bf < 0.01 decisive for H0; < 0.1 strong for H0; <= 1 leans H0; else H1.
JeffreysCategory jeffreys_category(double bf_10);
JeffreysCategory jeffreys_category_from_log(double log_bf_10);

/// t -> infinity limit of the GBF, (1 + n_delta sigma_a^2)^(v/2).
double gbf_information_limit(int v, double n_delta, double sigma_a2);
double log_gbf_information_limit(int v, double n_delta, double sigma_a2);

/// ln BF[H0:H1] from ln BF[H1:H0].
constexpr double bf_reciprocal(double log_bf_10) { return -log_bf_10; }

} // namespace ttbayes
