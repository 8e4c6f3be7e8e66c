#include "ttbayes/bayes.hpp"

#include "ttbayes/errors.hpp"

#include <cmath>
#include <sstream>

namespace ttbayes {

namespace {

void check_test(const TwoSampleTest& test) {
  if (test.v < 1) {
    throw DomainError("degrees of freedom must be at least 1");
  }
  if (!(test.n_delta > 0.0) || !std::isfinite(test.n_delta)) {
    throw DomainError("effective sample size must be positive");
  }
  if (!std::isfinite(test.t)) {
    throw DomainError("t-statistic must be finite");
  }
}

} // namespace

GbfConfig GbfConfig::from_sigma_a(double sigma_a) {
  if (!(sigma_a > 0.0) || !std::isfinite(sigma_a)) {
    throw HyperparameterError("sigma_a must be positive and finite");
  }
  return GbfConfig{sigma_a * sigma_a, 0.0};
}

void GbfConfig::validate() const {
  if (!(sigma_a2 > 0.0) || !std::isfinite(sigma_a2)) {
    throw HyperparameterError("sigma_a^2 must be positive and finite");
  }
  if (lambda != 0.0) {
    throw HyperparameterError("only a zero prior mean (lambda = 0) is supported");
  }
}

void PbfConfig::validate(int v) const {
  const double upper = v / 2.0 - 1.0;
  if (!(a > -1.0 && a < upper)) {
    std::ostringstream msg;
    msg << "hyper-prior shape a = " << a << " is outside (-1, " << upper
        << ") required for v = " << v;
    throw HyperparameterError(msg.str());
  }
}

std::string_view label(JeffreysCategory category) {
  switch (category) {
  case JeffreysCategory::DecisiveH0:
    return "decisive for H0";
  case JeffreysCategory::StrongH0:
    return "strong for H0";
  case JeffreysCategory::LeansH0:
    return "leans H0";
  case JeffreysCategory::LeansH1:
    return "leans H1";
  }
  return "unknown";
}

double log_gbf(const TwoSampleTest& test, const GbfConfig& config) {
  check_test(test);
  config.validate();
  const double dof = test.v;
  const double spread = test.n_delta * config.sigma_a2;
  const double log_one_plus_spread = std::log1p(spread);
  using numerics::log1p_square_ratio;
  return 0.5 * (dof + 1.0) *
             (log1p_square_ratio(test.t, dof) -
              log1p_square_ratio(test.t, dof, log_one_plus_spread)) -
         0.5 * log_one_plus_spread;
}

PbfClosedForm::PbfClosedForm(int v, const PbfConfig& config) : dof_(v) {
  if (v < 1) {
    throw DomainError("degrees of freedom must be at least 1");
  }
  config.validate(v);
  using numerics::log_gamma;
  const double a = config.a;
  log_constant_ = log_gamma(0.5 * dof_) + log_gamma(a + 1.5) -
                  log_gamma(0.5 * (dof_ + 1.0)) - log_gamma(a + 1.0);
  exponent_ = 0.5 * (dof_ - 2.0 * a - 2.0);
}

double log_pbf(const TwoSampleTest& test, const PbfConfig& config) {
  check_test(test);
  return PbfClosedForm(test.v, config).log_bf(test.t);
}

double pearson_vi_log_pdf(double x, double a, double b, double kappa) {
  if (!(x > 0.0)) {
    throw DomainError("Pearson VI density is supported on x > 0");
  }
  if (!(a > -1.0) || !(b > -1.0)) {
    throw DomainError("Pearson VI shapes must exceed -1");
  }
  if (!(kappa > 0.0)) {
    throw DomainError("Pearson VI scale must be positive");
  }
  const double scaled = kappa * x;
  return std::log(kappa) + b * std::log(scaled) -
         (a + b + 2.0) * std::log1p(scaled) -
         numerics::log_beta(a + 1.0, b + 1.0);
}

double pearson_vi_upper_tail(double threshold, double a, double b,
                             double kappa) {
  if (!(a > -1.0) || !(b > -1.0) || !(kappa > 0.0)) {
    throw DomainError("Pearson VI parameters out of range");
  }
  if (!(threshold > 0.0)) {
    return 1.0;
  }
  const double scaled = kappa * threshold;
  // P(U > u) with U ~ Beta(b+1, a+1) equals I_{1-u}(a+1, b+1).
  const double u = scaled / (1.0 + scaled);
  const double one_minus_u = 1.0 / (1.0 + scaled);
  return numerics::regularized_incomplete_beta(one_minus_u, u, a + 1.0,
                                               b + 1.0);
}

double log_pbf_quadrature(const TwoSampleTest& test, const PbfConfig& config,
                          const numerics::QuadratureSpec& spec) {
  check_test(test);
  config.validate(test.v);
  spec.validate();
  const double a = config.a;
  const double b = config.b(test.v);
  const double kappa = PbfConfig::kappa(test);
  // The GBF never exceeds (1 + t^2/v)^((v+1)/2); factor that out so the
  // integrand stays O(1) whatever t is.
  const double shift =
      0.5 * (test.v + 1.0) * numerics::log1p_square_ratio(test.t, test.v);
  auto integrand = [&](double sigma_a2) {
    const double log_gbf_value =
        log_gbf(test, GbfConfig{sigma_a2, 0.0});
    const double log_prior = pearson_vi_log_pdf(sigma_a2, a, b, kappa);
    return std::exp(log_gbf_value + log_prior - shift);
  };
  const double integral = numerics::integrate_semi_infinite(integrand, spec);
  if (!(integral > 0.0)) {
    throw ConvergenceError("PBF quadrature produced a non-positive integral",
                           integral, std::abs(integral));
  }
  return shift + std::log(integral);
}

BayesResult posterior_probability(double log_bf_10, double pi0, double pi1) {
  if (!(pi0 > 0.0 && pi0 < 1.0) || !(pi1 > 0.0 && pi1 < 1.0) ||
      std::abs(pi0 + pi1 - 1.0) > 1e-12) {
    throw DomainError(
        "prior probabilities must lie in (0, 1) and sum to 1");
  }
  if (std::isnan(log_bf_10)) {
    throw DomainError("log Bayes factor is NaN");
  }
  const double z = log_bf_10 + std::log(pi1) - std::log(pi0);
  double posterior;
  if (z >= 0.0) {
    posterior = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    posterior = e / (1.0 + e);
  }
  BayesResult result;
  result.log_bf_10 = log_bf_10;
  result.bf_10 = std::exp(log_bf_10);
  result.posterior_h1 = posterior;
  result.pi0 = pi0;
  result.pi1 = pi1;
  result.jeffreys = jeffreys_category_from_log(log_bf_10);
  return result;
}

JeffreysCategory jeffreys_category(double bf_10) {
  if (!(bf_10 >= 0.0)) {
    throw DomainError("Bayes factor must be non-negative");
  }
  if (bf_10 < 0.01) {
    return JeffreysCategory::DecisiveH0;
  }
  if (bf_10 < 0.1) {
    return JeffreysCategory::StrongH0;
  }
  if (bf_10 <= 1.0) {
    return JeffreysCategory::LeansH0;
  }
  return JeffreysCategory::LeansH1;
}

JeffreysCategory jeffreys_category_from_log(double log_bf_10) {
  if (std::isnan(log_bf_10)) {
    throw DomainError("log Bayes factor is NaN");
  }
  if (log_bf_10 > 0.0) {
    return JeffreysCategory::LeansH1;
  }
  // Below the overflow/underflow range the linear thresholds are exact.
  return jeffreys_category(std::exp(log_bf_10));
}

double log_gbf_information_limit(int v, double n_delta, double sigma_a2) {
  if (v < 1 || !(n_delta > 0.0) || !(sigma_a2 >= 0.0)) {
    throw DomainError("information limit needs v >= 1, n_delta > 0, "
                      "sigma_a^2 >= 0");
  }
  return 0.5 * v * std::log1p(n_delta * sigma_a2);
}

double gbf_information_limit(int v, double n_delta, double sigma_a2) {
  return std::exp(log_gbf_information_limit(v, n_delta, sigma_a2));
}

} // namespace ttbayes
