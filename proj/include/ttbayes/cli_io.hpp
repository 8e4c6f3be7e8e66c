#pragma once

#include "ttbayes/bayes.hpp"
#include "ttbayes/errors.hpp"
#include "ttbayes/samples.hpp"
#include "ttbayes/study.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ttbayes {

inline constexpr const char* kToolName = "ttbayes";
inline constexpr const char* kToolVersion = "0.1.0";

/// Bad command-line usage; the message names the offending flag.
class UsageError : public Error {
public:
  using Error::Error;
};

struct DataRow {
  int group = 1; // 1 or 2
  double value = 0.0;
  std::size_t line = 0;
};

/// Observations y_ij read from a `group,value` CSV file.
struct DataFile {
  std::vector<DataRow> rows;

  std::vector<double> values(int group) const;
};

/// Parses UTF-8 CSV with the header `group,value`. Blank lines are skipped.
/// Throws ParseError naming `source` and the line on a missing header, a
/// malformed row, a non-numeric or non-finite value, a group other than 1 or
/// 2, or a file that lacks one of the groups.
DataFile parse_csv(std::istream& in, const std::string& source = "<input>");
DataFile parse_csv_file(const std::filesystem::path& path);

/// How the `test` command obtained its two-sample test.
struct TestInputs {
  std::string source = "t"; // "data", "t" or "moments"
  std::optional<std::string> data_path;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::optional<double> t;
  std::optional<double> mean1;
  std::optional<double> mean2;
  std::optional<double> var1;
  std::optional<double> var2;
  double sigma_a = 1.0 / 3.0;
  double a = -0.75;
  double alpha = 0.05;
  double pi0 = 0.5;

  friend bool operator==(const TestInputs&, const TestInputs&) = default;
};

/// Everything the `test` command reports.
struct TestRecord {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  TestInputs inputs;
  TwoSampleTest test;
  FrequentistResult frequentist;
  BayesResult gbf;
  double pbf_b = 0.0;
  double pbf_kappa = 0.0;
  BayesResult pbf;
};

/// Resolves the inputs into a two-sample test (reading the data file when
/// `source == "data"`) and evaluates the p-value, GBF and PBF.
TestRecord run_test(const TestInputs& inputs);

/// Command-line entry point. `args` excludes the program name. Returns the
/// exit status: 0 success, 2 usage error, 3 data error, 4 numeric error.
int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err);

// JSON forms of the result records. Non-finite numbers are written as null
// and read back as +inf.
void to_json(nlohmann::json& j, const BayesResult& r);
void from_json(const nlohmann::json& j, BayesResult& r);
void to_json(nlohmann::json& j, const TwoSampleTest& t);
void from_json(const nlohmann::json& j, TwoSampleTest& t);
void to_json(nlohmann::json& j, const FrequentistResult& r);
void from_json(const nlohmann::json& j, FrequentistResult& r);
void to_json(nlohmann::json& j, const TestInputs& in);
void from_json(const nlohmann::json& j, TestInputs& in);
void to_json(nlohmann::json& j, const TestRecord& r);
void from_json(const nlohmann::json& j, TestRecord& r);

namespace study {
void to_json(nlohmann::json& j, const TestMethod& m);
void from_json(const nlohmann::json& j, TestMethod& m);
void to_json(nlohmann::json& j, const RejectionCurve& c);
void from_json(const nlohmann::json& j, RejectionCurve& c);
void to_json(nlohmann::json& j, const SweepTable& t);
void from_json(const nlohmann::json& j, SweepTable& t);
void to_json(nlohmann::json& j, const CurveSeries& c);
void from_json(const nlohmann::json& j, CurveSeries& c);

/// Parses "gbf", "pbf", "pvalue" (taking the parameter from the fallbacks)
/// or "gbf:0.1", "pbf:-0.75", "pvalue:0.05". Throws UsageError.
TestMethod parse_method(const std::string& text, double sigma_a, double a,
                        double alpha);
} // namespace study

} // namespace ttbayes
