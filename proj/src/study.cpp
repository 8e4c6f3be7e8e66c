#include "ttbayes/study.hpp"

#include "ttbayes/errors.hpp"
#include "ttbayes/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace ttbayes::study {

namespace {

constexpr std::size_t kReplicateChunk = 500;

double snap(double x) { return std::round(x * 1e10) / 1e10; }

void check_grid(std::span<const double> grid, const char* name) {
  if (grid.empty()) {
    throw DomainError(std::string(name) + " grid is empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) {
      throw DomainError(std::string(name) + " grid contains a non-finite value");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
  }
}

// Per-method decision with everything independent of t hoisted out.
class Decider {
public:
  Decider(const TestMethod& method, int v, double n_delta)
      : kind_(method.kind), v_(v), n_delta_(n_delta),
        parameter_(method.parameter) {
    switch (kind_) {
    case MethodKind::Gbf:
      gbf_ = GbfConfig::from_sigma_a(parameter_);
      break;
    case MethodKind::Pbf:
      pbf_.emplace(v, PbfConfig{parameter_});
      break;
    case MethodKind::PValue:
      break;
    }
  }

  bool rejects(double t) const {
    switch (kind_) {
    case MethodKind::Gbf:
      return log_gbf(TwoSampleTest{t, v_, n_delta_, std::nullopt}, gbf_) > 0.0;
    case MethodKind::Pbf:
      return pbf_->log_bf(t) > 0.0;
    case MethodKind::PValue:
      return two_sided_p_value(t, v_) < parameter_;
    }
    return false;
  }

private:
  MethodKind kind_;
  int v_;
  double n_delta_;
  double parameter_;
  GbfConfig gbf_;
  std::optional<PbfClosedForm> pbf_;
};

struct Task {
  std::size_t grid_index;
  std::size_t first;
  std::size_t last;
};

struct TaskResult {
  std::vector<std::uint64_t> rejections;
  std::uint64_t degenerate = 0;
};

} // namespace

std::vector<double> inclusive_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || hi < lo) {
    throw DomainError("grid needs finite lo <= hi and a positive step");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = snap(lo + static_cast<double>(i) * step);
  }
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) {
    throw DomainError("linear grid needs hi > lo and at least two points");
  }
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                       static_cast<double>(count - 1);
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0)) {
    throw DomainError("logarithmic grid needs a positive lower end");
  }
  auto grid = linear_grid(std::log(lo), std::log(hi), count);
  for (auto& x : grid) {
    x = std::exp(x);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::string TestMethod::describe() const {
  std::ostringstream out;
  switch (kind) {
  case MethodKind::Gbf:
    out << "GBF(sigma_a=" << parameter << ")";
    break;
  case MethodKind::Pbf:
    out << "PBF(a=" << parameter << ")";
    break;
  case MethodKind::PValue:
    out << "P-VALUE(alpha=" << parameter << ")";
    break;
  }
  return out.str();
}

std::vector<double> SimulationConfig::default_delta_grid() {
  return inclusive_grid(-4.0, 4.0, 0.1);
}

void SimulationConfig::validate() const {
  if (n1 < 1 || n2 < 1 || n1 + n2 < 3) {
    throw DomainError("simulation needs n1, n2 >= 1 and n1 + n2 >= 3");
  }
  if (replications < 1) {
    throw DomainError("simulation needs at least one replication");
  }
  if (delta_grid.empty()) {
    throw DomainError("delta grid is empty");
  }
  for (double d : delta_grid) {
    if (!std::isfinite(d)) {
      throw DomainError("delta grid contains a non-finite value");
    }
  }
  if (methods.empty()) {
    throw DomainError("simulation needs at least one method");
  }
  const int v = static_cast<int>(n1 + n2 - 2);
  for (const auto& m : methods) {
    switch (m.kind) {
    case MethodKind::Gbf:
      GbfConfig::from_sigma_a(m.parameter);
      break;
    case MethodKind::Pbf:
      PbfConfig{m.parameter}.validate(v);
      break;
    case MethodKind::PValue:
      if (!(m.parameter > 0.0 && m.parameter < 1.0)) {
        throw HyperparameterError("significance level must lie in (0, 1)");
      }
      break;
    }
  }
}

double RejectionCurve::standard_error(std::size_t i) const {
  const double p = frequency.at(i);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(replications));
}

unsigned resolve_worker_count(unsigned requested) {
  unsigned workers = requested;
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  if (const char* cap = std::getenv("BFT_THREADS"); cap != nullptr) {
    char* end = nullptr;
    const long value = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && value >= 1) {
      workers = std::min(workers, static_cast<unsigned>(value));
    }
  }
  return workers;
}

std::vector<RejectionCurve>
simulate_rejection_frequencies(const SimulationConfig& config) {
  config.validate();
  const int v = static_cast<int>(config.n1 + config.n2 - 2);
  const double n_delta = effective_sample_size(config.n1, config.n2);

  std::vector<Decider> deciders;
  deciders.reserve(config.methods.size());
  for (const auto& m : config.methods) {
    deciders.emplace_back(m, v, n_delta);
  }

  std::vector<Task> tasks;
  for (std::size_t g = 0; g < config.delta_grid.size(); ++g) {
    for (std::size_t r = 0; r < config.replications; r += kReplicateChunk) {
      tasks.push_back({g, r, std::min(config.replications, r + kReplicateChunk)});
    }
  }
  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run_tasks = [&] {
    std::vector<double> y1(config.n1);
    std::vector<double> y2(config.n2);
    for (std::size_t k = next.fetch_add(1); k < tasks.size();
         k = next.fetch_add(1)) {
      const Task& task = tasks[k];
      const double delta = config.delta_grid[task.grid_index];
      TaskResult out;
      out.rejections.assign(deciders.size(), 0);
      for (std::size_t r = task.first; r < task.last; ++r) {
        auto rng = substream(config.seed, task.grid_index, r);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& y : y1) {
          y = normal(rng);
        }
        for (auto& y : y2) {
          y = delta + normal(rng);
        }
        const SampleSummary s1 = summarize(y1);
        const SampleSummary s2 = summarize(y2);
        TwoSampleTest test;
        try {
          test = pooled_t(s1, s2);
        } catch (const DegenerateDataError&) {
          ++out.degenerate;
          continue;
        }
        for (std::size_t m = 0; m < deciders.size(); ++m) {
          if (deciders[m].rejects(test.t)) {
            ++out.rejections[m];
          }
        }
      }
      results[k] = std::move(out);
    }
  };
  auto worker = [&] {
    try {
      run_tasks();
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
      next.store(tasks.size());
    }
  };

  const unsigned workers = std::min<std::size_t>(
      resolve_worker_count(config.workers), tasks.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<RejectionCurve> curves(config.methods.size());
  std::uint64_t degenerate = 0;
  for (const auto& r : results) {
    degenerate += r.degenerate;
  }
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    auto& curve = curves[m];
    curve.method = config.methods[m];
    curve.n1 = config.n1;
    curve.n2 = config.n2;
    curve.delta = config.delta_grid;
    curve.rejections.assign(config.delta_grid.size(), 0);
    curve.replications = config.replications;
    curve.seed = config.seed;
    curve.degenerate_replicates = degenerate;
  }
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    for (std::size_t m = 0; m < curves.size(); ++m) {
      curves[m].rejections[tasks[k].grid_index] += results[k].rejections[m];
    }
  }
  for (auto& curve : curves) {
    curve.frequency.resize(curve.rejections.size());
    for (std::size_t g = 0; g < curve.rejections.size(); ++g) {
      curve.frequency[g] = static_cast<double>(curve.rejections[g]) /
                           static_cast<double>(curve.replications);
    }
  }
  return curves;
}

SweepTable hyperparameter_sweep(const TwoSampleTest& test, SweepMethod method,
                                std::span<const double> values, double pi0) {
  SweepTable table{test, method, pi0, {}};
  for (double value : values) {
    SweepRow row{value, std::nullopt, {}};
    try {
      const double log_bf =
          method == SweepMethod::Gbf
              ? log_gbf(test, GbfConfig::from_sigma_a(value))
              : log_pbf(test, PbfConfig{value});
      row.result = posterior_probability(log_bf, pi0, 1.0 - pi0);
    } catch (const DomainError& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ParadoxCurves paradox_curves(const ParadoxCurveSpec& spec) {
  check_grid(spec.sigma_grid, "sigma_a");
  check_grid(spec.a_grid, "a");
  check_grid(spec.t_grid, "t");
  for (double s : spec.sigma_grid) {
    if (!(s > 0.0)) {
      throw DomainError("sigma_a grid must be positive");
    }
  }
  const TwoSampleTest fixed{spec.t_fixed, spec.v, spec.n_delta, std::nullopt};
  std::ostringstream at_t;
  at_t << "t=" << spec.t_fixed << ", v=" << spec.v
       << ", n_delta=" << spec.n_delta;

  ParadoxCurves out;
  out.gbf_vs_sigma = {"GBF vs sigma_a (" + at_t.str() + ")", "sigma_a",
                      "GBF[H1:H0]", {}, {}};
  for (double s : spec.sigma_grid) {
    out.gbf_vs_sigma.x.push_back(s);
    out.gbf_vs_sigma.y.push_back(
        std::exp(log_gbf(fixed, GbfConfig::from_sigma_a(s))));
  }

  out.pbf_vs_a = {"PBF vs a (" + at_t.str() + ")", "a", "PBF[H1:H0]", {}, {}};
  const double upper = spec.v / 2.0 - 1.0;
  for (double a : spec.a_grid) {
    if (a > -1.0 && a < upper) {
      out.pbf_vs_a.x.push_back(a);
      out.pbf_vs_a.y.push_back(std::exp(log_pbf(fixed, PbfConfig{a})));
    }
  }

  std::ostringstream gbf_label;
  gbf_label << "GBF vs t (sigma_a=" << spec.gbf_sigma_a << ", v=" << spec.v
            << ", n_delta=" << spec.n_delta << ")";
  out.gbf_vs_t = {gbf_label.str(), "t", "GBF[H1:H0]", {}, {}};
  const auto gbf_config = GbfConfig::from_sigma_a(spec.gbf_sigma_a);
  for (double t : spec.t_grid) {
    out.gbf_vs_t.x.push_back(t);
    out.gbf_vs_t.y.push_back(std::exp(
        log_gbf(TwoSampleTest{t, spec.v, spec.n_delta, std::nullopt},
                gbf_config)));
  }

  std::ostringstream pbf_label;
  pbf_label << "PBF vs t (a=" << spec.pbf_a << ", v=" << spec.v << ")";
  out.pbf_vs_t = {pbf_label.str(), "t", "PBF[H1:H0]", {}, {}};
  const PbfClosedForm pbf(spec.v, PbfConfig{spec.pbf_a});
  for (double t : spec.t_grid) {
    out.pbf_vs_t.x.push_back(t);
    out.pbf_vs_t.y.push_back(std::exp(pbf.log_bf(t)));
  }
  return out;
}

CurveSeries prior_pdf_curve(std::size_t n1, std::size_t n2, double a,
                            std::span<const double> x_grid) {
  check_grid(x_grid, "sigma_a^2");
  if (x_grid.front() <= 0.0) {
    throw DomainError("prior density grid must be positive");
  }
  const auto design = TwoSampleTest::from_t(0.0, n1, n2);
  const PbfConfig config{a};
  config.validate(design.v);
  const double b = config.b(design.v);
  const double kappa = PbfConfig::kappa(design);

  std::ostringstream label;
  label << "hyper-prior density (n1=" << n1 << ", n2=" << n2 << ", a=" << a
        << ")";
  CurveSeries out{label.str(), "sigma_a^2", "density", {}, {}};
  for (double x : x_grid) {
    out.x.push_back(x);
    out.y.push_back(std::exp(pearson_vi_log_pdf(x, a, b, kappa)));
  }
  return out;
}

} // namespace ttbayes::study
