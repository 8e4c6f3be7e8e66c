#pragma once

#include "ttbayes/bayes.hpp"
#include "ttbayes/samples.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ttbayes::study {

/// lo, lo + step, ..., hi (hi included when it lies on the lattice). Points
/// are rounded to 1e-10 so that e.g. -4 + 37 * 0.1 prints as -0.3.
std::vector<double> inclusive_grid(double lo, double hi, double step);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);
std::vector<double> log_grid(double lo, double hi, std::size_t count);

enum class MethodKind { Gbf, Pbf, PValue };

/// A decision procedure for H0: delta = 0. Bayes methods reject when the
/// Bayes factor exceeds 1; the frequentist one when p < alpha.
struct TestMethod {
  MethodKind kind = MethodKind::Pbf;
  double parameter = -0.75; // sigma_a, a, or alpha depending on kind

  static TestMethod gbf(double sigma_a) { return {MethodKind::Gbf, sigma_a}; }
  static TestMethod pbf(double a) { return {MethodKind::Pbf, a}; }
  static TestMethod p_value(double alpha) {
    return {MethodKind::PValue, alpha};
  }

  /// e.g. "GBF(sigma_a=0.333333)", "PBF(a=-0.75)", "P-VALUE(alpha=0.05)".
  std::string describe() const;

  friend bool operator==(const TestMethod&, const TestMethod&) = default;
};

struct SimulationConfig {
  std::size_t n1 = 10;
  std::size_t n2 = 10;
  std::vector<double> delta_grid = default_delta_grid();
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  /// Every method is scored on the same simulated datasets.
  std::vector<TestMethod> methods;
  /// 0 picks the hardware concurrency (capped by BFT_THREADS when set).
  unsigned workers = 0;

  /// -4 to 4 in steps of 0.1, endpoints included (81 points).
  static std::vector<double> default_delta_grid();

  /// Throws DomainError on an invalid design and HyperparameterError on an
  /// illegal method parameter.
  void validate() const;
};

struct RejectionCurve {
  TestMethod method;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<double> delta;
  std::vector<std::uint64_t> rejections;
  std::vector<double> frequency;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  /// Replicates with zero pooled variance, counted as non-rejections.
  std::uint64_t degenerate_replicates = 0;

  /// Binomial standard error sqrt(p (1 - p) / R) at grid point i.
  double standard_error(std::size_t i) const;
};

/// Monte Carlo rejection frequencies, one curve per configured method.
/// Replicate r at grid point i draws from substream(seed, i, r), so the
/// output is bit-identical for any worker count.
std::vector<RejectionCurve>
simulate_rejection_frequencies(const SimulationConfig& config);

/// Worker count actually used for `requested` (0 = automatic), honoring the
/// BFT_THREADS environment cap.
unsigned resolve_worker_count(unsigned requested);

enum class SweepMethod { Gbf, Pbf };

struct SweepRow {
  double value = 0.0; // sigma_a for GBF, a for PBF
  std::optional<BayesResult> result;
  std::string error; // set when the value is illegal
};

struct SweepTable {
  TwoSampleTest test;
  SweepMethod method = SweepMethod::Pbf;
  double pi0 = 0.5;
  std::vector<SweepRow> rows;
};

/// One row per hyperparameter value with the Bayes factor and the posterior
/// at pi0 = pi1 = 1/2 (or the given pi0). Illegal values produce an error row.
SweepTable hyperparameter_sweep(const TwoSampleTest& test, SweepMethod method,
                                std::span<const double> values,
                                double pi0 = 0.5);

/// Plot-ready series. `x` is strictly increasing and `y` finite.
struct CurveSeries {
  std::string label;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ParadoxCurveSpec {
  int v = 18;
  double n_delta = 5.0;
  double t_fixed = 5.0;
  std::vector<double> sigma_grid = log_grid(0.01, 100.0, 201);
  std::vector<double> a_grid = inclusive_grid(-0.99, -0.01, 0.01);
  std::vector<double> t_grid = inclusive_grid(0.0, 20.0, 0.1);
  double gbf_sigma_a = 0.1;
  double pbf_a = -0.75;
};

struct ParadoxCurves {
  CurveSeries gbf_vs_sigma; // GBF against sigma_a at t_fixed
  CurveSeries pbf_vs_a;     // PBF against a at t_fixed (legal a only)
  CurveSeries gbf_vs_t;     // GBF against t at gbf_sigma_a
  CurveSeries pbf_vs_t;     // PBF against t at pbf_a
};

ParadoxCurves paradox_curves(const ParadoxCurveSpec& spec);

/// Hyper-prior density of sigma_a^2 at kappa = n_delta and
/// b = (v + 1)/2 - a - 5/2 for the design (n1, n2).
CurveSeries prior_pdf_curve(std::size_t n1, std::size_t n2, double a,
                            std::span<const double> x_grid);

} // namespace ttbayes::study
