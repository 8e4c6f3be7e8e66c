#include "ttbayes/cli_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace ttbayes {

using nlohmann::json;

namespace {

json number(double x) {
  return std::isfinite(x) ? json(x) : json(nullptr);
}

double read_number(const json& j) {
  if (j.is_null()) {
    return std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

JeffreysCategory category_from_label(const std::string& text) {
  for (auto c : {JeffreysCategory::DecisiveH0, JeffreysCategory::StrongH0,
                 JeffreysCategory::LeansH0, JeffreysCategory::LeansH1}) {
    if (label(c) == text) {
      return c;
    }
  }
  throw DomainError("unknown Jeffreys category '" + text + "'");
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  j[key] = value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return j.at(key).get<T>();
}

/// Six significant digits, as in the printed tables.
std::string short_number(double x) {
  if (std::isnan(x)) {
    return "NA";
  }
  if (std::isinf(x)) {
    return x > 0 ? "Inf" : "-Inf";
  }
  std::ostringstream out;
  out << std::setprecision(6) << x;
  return out.str();
}

[[noreturn]] void flag_error(const std::string& flag, const std::string& what) {
  throw UsageError(flag + ": " + what);
}

void check_pi0(double pi0) {
  if (!(pi0 > 0.0 && pi0 < 1.0)) {
    flag_error("--pi0", "prior probability of H0 must lie in (0, 1)");
  }
}

} // namespace

// ---------------------------------------------------------------------------
// CSV ingestion

std::vector<double> DataFile::values(int group) const {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.group == group) {
      out.push_back(row.value);
    }
  }
  return out;
}

DataFile parse_csv(std::istream& in, const std::string& source) {
  DataFile file;
  std::string raw;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_number;
    std::string_view line = raw;
    if (line_number == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.remove_prefix(3);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (!header_seen) {
      if (comma == std::string_view::npos ||
          trim(line.substr(0, comma)) != "group" ||
          trim(line.substr(comma + 1)) != "value") {
        throw ParseError(source + ":" + std::to_string(line_number) +
                             ": expected header 'group,value'",
                         line_number);
      }
      header_seen = true;
      continue;
    }
    if (comma == std::string_view::npos ||
        line.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(source + ":" + std::to_string(line_number) +
                           ": expected two comma-separated fields",
                       line_number);
    }
    const auto group_text = trim(line.substr(0, comma));
    const auto value_text = trim(line.substr(comma + 1));
    DataRow row;
    row.line = line_number;
    if (group_text == "1") {
      row.group = 1;
    } else if (group_text == "2") {
      row.group = 2;
    } else {
      throw ParseError(source + ":" + std::to_string(line_number) +
                           ": unknown group label '" + std::string(group_text) +
                           "' (expected 1 or 2)",
                       line_number);
    }
    const char* begin = value_text.data();
    const char* end = begin + value_text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, row.value);
    if (ec != std::errc() || ptr != end || value_text.empty()) {
      throw ParseError(source + ":" + std::to_string(line_number) +
                           ": value '" + std::string(value_text) +
                           "' is not a number",
                       line_number);
    }
    if (!std::isfinite(row.value)) {
      throw ParseError(source + ":" + std::to_string(line_number) +
                           ": value is not finite",
                       line_number);
    }
    file.rows.push_back(row);
  }
  if (!header_seen) {
    throw ParseError(source + ": missing header 'group,value'", 0);
  }
  for (int group : {1, 2}) {
    const bool present =
        std::any_of(file.rows.begin(), file.rows.end(),
                    [group](const DataRow& r) { return r.group == group; });
    if (!present) {
      throw ParseError(source + ":" + std::to_string(line_number) +
                           ": no observations for group " +
                           std::to_string(group) + " (both groups required)",
                       line_number);
    }
  }
  return file;
}

DataFile parse_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open data file '" + path.string() + "'");
  }
  return parse_csv(in, path.string());
}

// ---------------------------------------------------------------------------
// The `test` computation

namespace {

TwoSampleTest resolve_test(const TestInputs& in) {
  if (in.source == "data") {
    if (!in.data_path) {
      flag_error("--data", "a file path is required");
    }
    const auto file = parse_csv_file(*in.data_path);
    const auto g1 = file.values(1);
    const auto g2 = file.values(2);
    return pooled_t(summarize(g1), summarize(g2));
  }
  if (in.n1 < 1) {
    flag_error("--n1", "group size must be at least 1");
  }
  if (in.n2 < 1) {
    flag_error("--n2", "group size must be at least 1");
  }
  if (in.source == "t") {
    if (!in.t || !std::isfinite(*in.t)) {
      flag_error("--t", "a finite t-statistic is required");
    }
    return TwoSampleTest::from_t(*in.t, in.n1, in.n2);
  }
  if (in.source == "moments") {
    auto moment = [](const std::optional<double>& x, const char* flag) {
      if (!x || !std::isfinite(*x)) {
        flag_error(flag, "a finite value is required");
      }
      return *x;
    };
    const double m1 = moment(in.mean1, "--mean1");
    const double m2 = moment(in.mean2, "--mean2");
    const double v1 = moment(in.var1, "--var1");
    const double v2 = moment(in.var2, "--var2");
    if (v1 < 0.0 || (in.n1 == 1 && v1 != 0.0)) {
      flag_error("--var1", "must be >= 0 (and 0 when --n1 is 1)");
    }
    if (v2 < 0.0 || (in.n2 == 1 && v2 != 0.0)) {
      flag_error("--var2", "must be >= 0 (and 0 when --n2 is 1)");
    }
    return pooled_t(SampleSummary::from_moments(in.n1, m1, v1),
                    SampleSummary::from_moments(in.n2, m2, v2));
  }
  throw UsageError("unknown input source '" + in.source + "'");
}

} // namespace

TestRecord run_test(const TestInputs& inputs) {
  check_pi0(inputs.pi0);
  if (!(inputs.alpha > 0.0 && inputs.alpha < 1.0)) {
    flag_error("--alpha", "significance level must lie in (0, 1)");
  }
  if (!(inputs.sigma_a > 0.0) || !std::isfinite(inputs.sigma_a)) {
    flag_error("--sigma-a", "must be positive and finite");
  }
  TestRecord record;
  record.inputs = inputs;
  record.test = resolve_test(inputs);

  const PbfConfig pbf_config{inputs.a};
  try {
    pbf_config.validate(record.test.v);
  } catch (const HyperparameterError& e) {
    flag_error("--a", e.what());
  }

  const double pi0 = inputs.pi0;
  const double pi1 = 1.0 - pi0;
  record.frequentist = two_sided_p_value(record.test, inputs.alpha);
  record.gbf = posterior_probability(
      log_gbf(record.test, GbfConfig::from_sigma_a(inputs.sigma_a)), pi0, pi1);
  record.pbf_b = pbf_config.b(record.test.v);
  record.pbf_kappa = PbfConfig::kappa(record.test);
  record.pbf =
      posterior_probability(log_pbf(record.test, pbf_config), pi0, pi1);
  return record;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const BayesResult& r) {
  j = json{{"log_bf_10", number(r.log_bf_10)},
           {"bf_10", number(r.bf_10)},
           {"posterior_h1", r.posterior_h1},
           {"pi0", r.pi0},
           {"pi1", r.pi1},
           {"jeffreys", std::string(label(r.jeffreys))}};
}

void from_json(const json& j, BayesResult& r) {
  r.log_bf_10 = read_number(j.at("log_bf_10"));
  r.bf_10 = read_number(j.at("bf_10"));
  r.posterior_h1 = j.at("posterior_h1").get<double>();
  r.pi0 = j.at("pi0").get<double>();
  r.pi1 = j.at("pi1").get<double>();
  r.jeffreys = category_from_label(j.at("jeffreys").get<std::string>());
}

void to_json(json& j, const TwoSampleTest& t) {
  j = json{{"t", t.t}, {"v", t.v}, {"n_delta", t.n_delta}};
  put_optional(j, "s_p2", t.s_p2);
}

void from_json(const json& j, TwoSampleTest& t) {
  t.t = j.at("t").get<double>();
  t.v = j.at("v").get<int>();
  t.n_delta = j.at("n_delta").get<double>();
  t.s_p2 = get_optional<double>(j, "s_p2");
}

void to_json(json& j, const FrequentistResult& r) {
  j = json{{"p_value", r.p_value}, {"alpha", r.alpha}, {"reject_h0", r.reject_h0}};
}

void from_json(const json& j, FrequentistResult& r) {
  r.p_value = j.at("p_value").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.reject_h0 = j.at("reject_h0").get<bool>();
}

void to_json(json& j, const TestInputs& in) {
  j = json{{"source", in.source}, {"n1", in.n1},     {"n2", in.n2},
           {"sigma_a", in.sigma_a}, {"a", in.a},     {"alpha", in.alpha},
           {"pi0", in.pi0}};
  put_optional(j, "data", in.data_path);
  put_optional(j, "t", in.t);
  put_optional(j, "mean1", in.mean1);
  put_optional(j, "mean2", in.mean2);
  put_optional(j, "var1", in.var1);
  put_optional(j, "var2", in.var2);
}

void from_json(const json& j, TestInputs& in) {
  in.source = j.at("source").get<std::string>();
  in.n1 = j.at("n1").get<std::size_t>();
  in.n2 = j.at("n2").get<std::size_t>();
  in.sigma_a = j.at("sigma_a").get<double>();
  in.a = j.at("a").get<double>();
  in.alpha = j.at("alpha").get<double>();
  in.pi0 = j.at("pi0").get<double>();
  in.data_path = get_optional<std::string>(j, "data");
  in.t = get_optional<double>(j, "t");
  in.mean1 = get_optional<double>(j, "mean1");
  in.mean2 = get_optional<double>(j, "mean2");
  in.var1 = get_optional<double>(j, "var1");
  in.var2 = get_optional<double>(j, "var2");
}

void to_json(json& j, const TestRecord& r) {
  json gbf = r.gbf;
  gbf["sigma_a"] = r.inputs.sigma_a;
  gbf["sigma_a2"] = r.inputs.sigma_a * r.inputs.sigma_a;
  json pbf = r.pbf;
  pbf["a"] = r.inputs.a;
  pbf["b"] = r.pbf_b;
  pbf["kappa"] = r.pbf_kappa;
  j = json{{"tool", r.tool},     {"version", r.version},
           {"command", "test"},  {"inputs", r.inputs},
           {"test", r.test},     {"frequentist", r.frequentist},
           {"gbf", gbf},         {"pbf", pbf}};
}

void from_json(const json& j, TestRecord& r) {
  r.tool = j.at("tool").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.inputs = j.at("inputs").get<TestInputs>();
  r.test = j.at("test").get<TwoSampleTest>();
  r.frequentist = j.at("frequentist").get<FrequentistResult>();
  r.gbf = j.at("gbf").get<BayesResult>();
  r.pbf = j.at("pbf").get<BayesResult>();
  r.pbf_b = j.at("pbf").at("b").get<double>();
  r.pbf_kappa = j.at("pbf").at("kappa").get<double>();
}

namespace study {

namespace {

const char* kind_name(MethodKind kind) {
  switch (kind) {
  case MethodKind::Gbf:
    return "gbf";
  case MethodKind::Pbf:
    return "pbf";
  case MethodKind::PValue:
    return "pvalue";
  }
  return "?";
}

MethodKind kind_from_name(const std::string& name) {
  if (name == "gbf") {
    return MethodKind::Gbf;
  }
  if (name == "pbf") {
    return MethodKind::Pbf;
  }
  if (name == "pvalue" || name == "p-value") {
    return MethodKind::PValue;
  }
  throw UsageError("--method: unknown method '" + name +
                   "' (expected gbf, pbf or pvalue)");
}

} // namespace

void to_json(json& j, const TestMethod& m) {
  j = json{{"kind", kind_name(m.kind)},
           {"parameter", m.parameter},
           {"label", m.describe()}};
}

void from_json(const json& j, TestMethod& m) {
  m.kind = kind_from_name(j.at("kind").get<std::string>());
  m.parameter = j.at("parameter").get<double>();
}

void to_json(json& j, const RejectionCurve& c) {
  j = json{{"method", c.method},
           {"n1", c.n1},
           {"n2", c.n2},
           {"replications", c.replications},
           {"seed", c.seed},
           {"degenerate_replicates", c.degenerate_replicates},
           {"delta", c.delta},
           {"rejections", c.rejections},
           {"frequency", c.frequency}};
}

void from_json(const json& j, RejectionCurve& c) {
  c.method = j.at("method").get<TestMethod>();
  c.n1 = j.at("n1").get<std::size_t>();
  c.n2 = j.at("n2").get<std::size_t>();
  c.replications = j.at("replications").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.degenerate_replicates = j.at("degenerate_replicates").get<std::uint64_t>();
  c.delta = j.at("delta").get<std::vector<double>>();
  c.rejections = j.at("rejections").get<std::vector<std::uint64_t>>();
  c.frequency = j.at("frequency").get<std::vector<double>>();
}

void to_json(json& j, const SweepTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r{{"value", row.value}};
    if (row.result) {
      r["result"] = *row.result;
    } else {
      r["result"] = nullptr;
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  j = json{{"test", t.test},
           {"method", t.method == SweepMethod::Gbf ? "gbf" : "pbf"},
           {"hyperparameter", t.method == SweepMethod::Gbf ? "sigma_a" : "a"},
           {"pi0", t.pi0},
           {"rows", rows}};
}

void from_json(const json& j, SweepTable& t) {
  t.test = j.at("test").get<TwoSampleTest>();
  t.method = j.at("method").get<std::string>() == "gbf" ? SweepMethod::Gbf
                                                         : SweepMethod::Pbf;
  t.pi0 = j.at("pi0").get<double>();
  t.rows.clear();
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.value = r.at("value").get<double>();
    if (!r.at("result").is_null()) {
      row.result = r.at("result").get<BayesResult>();
    } else {
      row.error = r.at("error").get<std::string>();
    }
    t.rows.push_back(std::move(row));
  }
}

void to_json(json& j, const CurveSeries& c) {
  json ys = json::array();
  for (double y : c.y) {
    ys.push_back(number(y));
  }
  j = json{{"label", c.label}, {"x_label", c.x_label}, {"y_label", c.y_label},
           {"x", c.x},         {"y", ys}};
}

void from_json(const json& j, CurveSeries& c) {
  c.label = j.at("label").get<std::string>();
  c.x_label = j.at("x_label").get<std::string>();
  c.y_label = j.at("y_label").get<std::string>();
  c.x = j.at("x").get<std::vector<double>>();
  c.y.clear();
  for (const auto& y : j.at("y")) {
    c.y.push_back(read_number(y));
  }
}

TestMethod parse_method(const std::string& text, double sigma_a, double a,
                        double alpha) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const MethodKind kind = kind_from_name(name);
  double parameter = kind == MethodKind::Gbf   ? sigma_a
                     : kind == MethodKind::Pbf ? a
                                               : alpha;
  if (colon != std::string::npos) {
    const std::string value = text.substr(colon + 1);
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, parameter);
    if (ec != std::errc() || ptr != end || value.empty()) {
      throw UsageError("--method: cannot read parameter in '" + text + "'");
    }
  }
  return TestMethod{kind, parameter};
}

} // namespace study

// ---------------------------------------------------------------------------
// Text renderings

namespace {

void write_test_csv(std::ostream& out, const TestRecord& r) {
  out << "field,value\n";
  out << "t," << short_number(r.test.t) << "\n";
  out << "v," << r.test.v << "\n";
  out << "n_delta," << short_number(r.test.n_delta) << "\n";
  out << "s_p2," << (r.test.s_p2 ? short_number(*r.test.s_p2) : "NA") << "\n";
  out << "p_value," << short_number(r.frequentist.p_value) << "\n";
  out << "alpha," << short_number(r.frequentist.alpha) << "\n";
  out << "reject_h0," << (r.frequentist.reject_h0 ? "true" : "false") << "\n";
  auto bayes = [&](const char* name, const BayesResult& b) {
    out << name << "_log_bf_10," << short_number(b.log_bf_10) << "\n";
    out << name << "_bf_10," << short_number(b.bf_10) << "\n";
    out << name << "_posterior_h1," << short_number(b.posterior_h1) << "\n";
    out << name << "_jeffreys," << label(b.jeffreys) << "\n";
  };
  out << "gbf_sigma_a," << short_number(r.inputs.sigma_a) << "\n";
  bayes("gbf", r.gbf);
  out << "pbf_a," << short_number(r.inputs.a) << "\n";
  out << "pbf_b," << short_number(r.pbf_b) << "\n";
  bayes("pbf", r.pbf);
  out << "pi0," << short_number(r.inputs.pi0) << "\n";
  out << "version," << r.version << "\n";
}

void write_sweep_csv(std::ostream& out, const study::SweepTable& t) {
  out << "method,value,log_bf_10,bf_10,posterior_h1,jeffreys,error\n";
  const char* method = t.method == study::SweepMethod::Gbf ? "gbf" : "pbf";
  for (const auto& row : t.rows) {
    out << method << "," << short_number(row.value) << ",";
    if (row.result) {
      out << short_number(row.result->log_bf_10) << ","
          << short_number(row.result->bf_10) << ","
          << short_number(row.result->posterior_h1) << ","
          << label(row.result->jeffreys) << ",\n";
    } else {
      out << "NA,NA,NA,NA,\"" << row.error << "\"\n";
    }
  }
}

void write_curves_csv(std::ostream& out,
                      const std::vector<study::RejectionCurve>& curves) {
  out << "method,n1,n2,delta,rejections,replications,frequency\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.delta.size(); ++i) {
      out << c.method.describe() << "," << c.n1 << "," << c.n2 << ","
          << short_number(c.delta[i]) << "," << c.rejections[i] << ","
          << c.replications << "," << short_number(c.frequency[i]) << "\n";
    }
  }
}

void write_series_csv(std::ostream& out,
                      const std::vector<study::CurveSeries>& series) {
  out << "series,x,y\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "\"" << s.label << "\"," << short_number(s.x[i]) << ","
          << short_number(s.y[i]) << "\n";
    }
  }
}

json envelope(const char* command) {
  return json{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}};
}

void check_format(const std::string& format) {
  if (format != "json" && format != "csv") {
    flag_error("--format", "expected json or csv, got '" + format + "'");
  }
}

// Options shared by `test` and `sweep` for specifying the two-sample test.
struct TestInputOptions {
  std::string data;
  std::optional<double> t;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::optional<double> mean1;
  std::optional<double> mean2;
  std::optional<double> var1;
  std::optional<double> var2;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data, "CSV file with header group,value");
    cmd->add_option("--t", t, "Published pooled t-statistic");
    cmd->add_option("--n1", n1, "Size of group 1");
    cmd->add_option("--n2", n2, "Size of group 2");
    cmd->add_option("--mean1", mean1, "Mean of group 1");
    cmd->add_option("--mean2", mean2, "Mean of group 2");
    cmd->add_option("--var1", var1, "Sample variance of group 1 (n-1 divisor)");
    cmd->add_option("--var2", var2, "Sample variance of group 2 (n-1 divisor)");
  }

  void fill(TestInputs& in) const {
    const bool any_moment = mean1 || mean2 || var1 || var2;
    if (!data.empty()) {
      if (t || any_moment || n1 != 0 || n2 != 0) {
        flag_error("--data",
                   "cannot be combined with --t, --n1, --n2 or moment flags");
      }
      in.source = "data";
      in.data_path = data;
      return;
    }
    if (n1 == 0) {
      flag_error("--n1", "required unless --data is given");
    }
    if (n2 == 0) {
      flag_error("--n2", "required unless --data is given");
    }
    in.n1 = n1;
    in.n2 = n2;
    if (t) {
      if (any_moment) {
        flag_error("--t", "give either --t or --mean1/--mean2/--var1/--var2");
      }
      in.source = "t";
      in.t = t;
      return;
    }
    if (!any_moment) {
      flag_error("--t", "required (or --mean1/--mean2/--var1/--var2, or --data)");
    }
    in.source = "moments";
    in.mean1 = mean1;
    in.mean2 = mean2;
    in.var1 = var1;
    in.var2 = var2;
  }
};

} // namespace

// ---------------------------------------------------------------------------
// Dispatch

int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Two-sample Bayesian t-test: closed-form Bayes factors, "
               "sensitivity sweeps and rejection-frequency simulations",
               kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // test
  auto* test_cmd = app.add_subcommand("test", "Evaluate p-value, GBF and PBF");
  TestInputOptions test_inputs;
  test_inputs.attach(test_cmd);
  TestInputs test_settings;
  std::string test_format = "json";
  test_cmd->add_option("--sigma-a", test_settings.sigma_a,
                       "GBF prior standard deviation sigma_a")
      ->capture_default_str();
  test_cmd->add_option("--a", test_settings.a, "PBF hyper-prior shape a")
      ->capture_default_str();
  test_cmd->add_option("--alpha", test_settings.alpha, "Significance level")
      ->capture_default_str();
  test_cmd->add_option("--pi0", test_settings.pi0, "Prior probability of H0")
      ->capture_default_str();
  test_cmd->add_option("--format", test_format, "json or csv")
      ->capture_default_str();

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Bayes factor across hyperparameter values");
  TestInputOptions sweep_inputs;
  sweep_inputs.attach(sweep_cmd);
  std::string sweep_method;
  std::vector<double> sweep_values;
  double sweep_pi0 = 0.5;
  std::string sweep_format = "json";
  sweep_cmd->add_option("--method", sweep_method, "gbf (values are sigma_a) or pbf (values are a)")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated hyperparameter values")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--pi0", sweep_pi0, "Prior probability of H0")
      ->capture_default_str();
  sweep_cmd->add_option("--format", sweep_format, "json or csv")
      ->capture_default_str();

  // simulate
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo rejection frequencies over a delta grid");
  std::size_t sim_n1 = 0;
  std::size_t sim_n2 = 0;
  std::size_t sim_reps = 10000;
  std::uint64_t sim_seed = 0;
  double delta_min = -4.0;
  double delta_max = 4.0;
  double delta_step = 0.1;
  std::vector<std::string> sim_methods;
  double sim_sigma_a = 1.0 / 3.0;
  double sim_a = -0.75;
  double sim_alpha = 0.05;
  unsigned sim_threads = 0;
  std::string sim_format = "json";
  sim_cmd->add_option("--n1", sim_n1, "Size of group 1")->required();
  sim_cmd->add_option("--n2", sim_n2, "Size of group 2")->required();
  sim_cmd->add_option("--reps", sim_reps, "Replications per delta")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "64-bit seed")->required();
  sim_cmd->add_option("--delta-min", delta_min)->capture_default_str();
  sim_cmd->add_option("--delta-max", delta_max)->capture_default_str();
  sim_cmd->add_option("--delta-step", delta_step)->capture_default_str();
  sim_cmd
      ->add_option("--method", sim_methods,
                   "gbf[:sigma_a], pbf[:a] or pvalue[:alpha]; repeat or "
                   "comma-separate (default: gbf,pbf,pvalue)")
      ->delimiter(',');
  sim_cmd->add_option("--sigma-a", sim_sigma_a, "Default sigma_a for gbf")
      ->capture_default_str();
  sim_cmd->add_option("--a", sim_a, "Default a for pbf")->capture_default_str();
  sim_cmd->add_option("--alpha", sim_alpha, "Default alpha for pvalue")
      ->capture_default_str();
  sim_cmd->add_option("--threads", sim_threads,
                      "Worker threads (0 = all cores, capped by BFT_THREADS)")
      ->capture_default_str();
  sim_cmd->add_option("--format", sim_format, "json or csv")
      ->capture_default_str();

  // curves
  auto* curves_cmd =
      app.add_subcommand("curves", "Plot data for prior densities and Bayes factor curves");
  std::string curve_kind;
  std::size_t curve_n1 = 0;
  std::size_t curve_n2 = 0;
  double curve_a = -0.75;
  double curve_sigma_a = 0.1;
  double curve_t = 5.0;
  std::string curve_method = "both";
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::optional<std::size_t> points;
  std::string curve_format = "json";
  curves_cmd->add_option("--kind", curve_kind, "prior, bf-vs-hyper or bf-vs-t")
      ->required();
  curves_cmd->add_option("--n1", curve_n1, "Size of group 1")->required();
  curves_cmd->add_option("--n2", curve_n2, "Size of group 2")->required();
  curves_cmd->add_option("--a", curve_a, "PBF shape a (prior and bf-vs-t)")
      ->capture_default_str();
  curves_cmd->add_option("--sigma-a", curve_sigma_a, "GBF sigma_a for bf-vs-t")
      ->capture_default_str();
  curves_cmd->add_option("--t", curve_t, "Fixed t for bf-vs-hyper")
      ->capture_default_str();
  curves_cmd->add_option("--method", curve_method, "gbf, pbf or both")
      ->capture_default_str();
  curves_cmd->add_option("--x-min", x_min, "Grid lower end");
  curves_cmd->add_option("--x-max", x_max, "Grid upper end");
  curves_cmd->add_option("--points", points, "Grid size");
  curves_cmd->add_option("--format", curve_format, "json or csv")
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back(kToolName);
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return 2;
    }

    if (*test_cmd) {
      check_format(test_format);
      test_inputs.fill(test_settings);
      const TestRecord record = run_test(test_settings);
      if (test_format == "json") {
        out << json(record).dump(2) << "\n";
      } else {
        write_test_csv(out, record);
      }
      return 0;
    }

    if (*sweep_cmd) {
      check_format(sweep_format);
      check_pi0(sweep_pi0);
      study::SweepMethod method;
      if (sweep_method == "gbf") {
        method = study::SweepMethod::Gbf;
      } else if (sweep_method == "pbf") {
        method = study::SweepMethod::Pbf;
      } else {
        flag_error("--method", "expected gbf or pbf, got '" + sweep_method + "'");
      }
      TestInputs in;
      sweep_inputs.fill(in);
      in.pi0 = sweep_pi0;
      const auto table = study::hyperparameter_sweep(resolve_test(in), method,
                                                     sweep_values, sweep_pi0);
      if (sweep_format == "json") {
        json doc = envelope("sweep");
        doc["inputs"] = in;
        doc["sweep"] = table;
        out << doc.dump(2) << "\n";
      } else {
        write_sweep_csv(out, table);
      }
      return 0;
    }

    if (*sim_cmd) {
      check_format(sim_format);
      study::SimulationConfig config;
      config.n1 = sim_n1;
      config.n2 = sim_n2;
      if (sim_n1 < 1 || sim_n2 < 1 || sim_n1 + sim_n2 < 3) {
        flag_error("--n1/--n2", "need n1, n2 >= 1 and n1 + n2 >= 3");
      }
      if (sim_reps < 1) {
        flag_error("--reps", "must be at least 1");
      }
      config.replications = sim_reps;
      config.seed = sim_seed;
      try {
        config.delta_grid = study::inclusive_grid(delta_min, delta_max, delta_step);
      } catch (const DomainError& e) {
        flag_error("--delta-min/--delta-max/--delta-step", e.what());
      }
      if (sim_methods.empty()) {
        sim_methods = {"gbf", "pbf", "pvalue"};
      }
      for (const auto& m : sim_methods) {
        config.methods.push_back(
            study::parse_method(m, sim_sigma_a, sim_a, sim_alpha));
      }
      try {
        config.validate();
      } catch (const HyperparameterError& e) {
        flag_error("--method", e.what());
      } catch (const DomainError& e) {
        flag_error("--method", e.what());
      }
      config.workers = sim_threads;
      const auto curves = study::simulate_rejection_frequencies(config);
      if (!curves.empty() && curves.front().degenerate_replicates > 0) {
        err << "warning: " << curves.front().degenerate_replicates
            << " replicate(s) had zero pooled variance and were counted as "
               "non-rejections\n";
      }
      if (sim_format == "json") {
        json doc = envelope("simulate");
        doc["seed"] = sim_seed;
        doc["curves"] = curves;
        out << doc.dump(2) << "\n";
      } else {
        write_curves_csv(out, curves);
      }
      return 0;
    }

    if (*curves_cmd) {
      check_format(curve_format);
      if (curve_method != "gbf" && curve_method != "pbf" &&
          curve_method != "both") {
        flag_error("--method", "expected gbf, pbf or both");
      }
      TwoSampleTest design;
      try {
        design = TwoSampleTest::from_t(curve_t, curve_n1, curve_n2);
      } catch (const Error& e) {
        flag_error("--n1/--n2", e.what());
      }
      auto grid_or = [&](std::vector<double> fallback, bool logarithmic) {
        if (!x_min && !x_max && !points) {
          return fallback;
        }
        const double lo = x_min.value_or(fallback.front());
        const double hi = x_max.value_or(fallback.back());
        const std::size_t count = points.value_or(fallback.size());
        try {
          return logarithmic ? study::log_grid(lo, hi, count)
                             : study::linear_grid(lo, hi, count);
        } catch (const DomainError& e) {
          flag_error("--x-min/--x-max/--points", e.what());
        }
      };
      const bool want_gbf = curve_method != "pbf";
      const bool want_pbf = curve_method != "gbf";
      std::vector<study::CurveSeries> series;
      if (curve_kind == "prior") {
        const auto grid = grid_or(study::linear_grid(0.01, 5.0, 500), false);
        try {
          PbfConfig{curve_a}.validate(design.v);
        } catch (const HyperparameterError& e) {
          flag_error("--a", e.what());
        }
        series.push_back(study::prior_pdf_curve(curve_n1, curve_n2, curve_a, grid));
      } else if (curve_kind == "bf-vs-hyper" || curve_kind == "bf-vs-t") {
        study::ParadoxCurveSpec spec;
        spec.v = design.v;
        spec.n_delta = design.n_delta;
        spec.t_fixed = curve_t;
        spec.gbf_sigma_a = curve_sigma_a;
        spec.pbf_a = curve_a;
        if (!(curve_sigma_a > 0.0)) {
          flag_error("--sigma-a", "must be positive");
        }
        try {
          PbfConfig{curve_a}.validate(design.v);
        } catch (const HyperparameterError& e) {
          flag_error("--a", e.what());
        }
        if (curve_kind == "bf-vs-hyper") {
          if (curve_method == "both" && (x_min || x_max || points)) {
            flag_error("--x-min/--x-max/--points",
                       "grid overrides need --method gbf or --method pbf");
          }
          if (want_gbf) {
            spec.sigma_grid = grid_or(spec.sigma_grid, true);
          } else {
            spec.a_grid = grid_or(spec.a_grid, false);
          }
        } else {
          spec.t_grid = grid_or(spec.t_grid, false);
        }
        const auto curves = study::paradox_curves(spec);
        if (curve_kind == "bf-vs-hyper") {
          if (want_gbf) series.push_back(curves.gbf_vs_sigma);
          if (want_pbf) series.push_back(curves.pbf_vs_a);
        } else {
          if (want_gbf) series.push_back(curves.gbf_vs_t);
          if (want_pbf) series.push_back(curves.pbf_vs_t);
        }
      } else {
        flag_error("--kind", "expected prior, bf-vs-hyper or bf-vs-t, got '" +
                                 curve_kind + "'");
      }
      if (curve_format == "json") {
        json doc = envelope("curves");
        doc["kind"] = curve_kind;
        doc["series"] = series;
        out << doc.dump(2) << "\n";
      } else {
        write_series_csv(out, series);
      }
      return 0;
    }
    err << "no subcommand given\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const HyperparameterError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

} // namespace ttbayes
