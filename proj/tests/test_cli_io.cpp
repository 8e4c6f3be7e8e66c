#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ttbayes/cli_io.hpp"

#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace ttbayes;
using nlohmann::json;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;

  json doc() const { return json::parse(out); }
};

CliRun cli(std::initializer_list<std::string> args) {
  const std::vector<std::string> argv(args);
  std::ostringstream out;
  std::ostringstream err;
  CliRun run;
  run.status = run_cli(argv, out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

std::string fixture(const std::string& name) {
  return std::string(TTBAYES_TEST_DATA_DIR) + "/" + name;
}

DataFile parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "mem.csv");
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

// Every number in `x` equals the one at the same position in `y` to `tol`
// relative; strings, booleans and structure must match exactly.
void check_close(const json& x, const json& y, double tol, const std::string& path = "") {
  CAPTURE(path);
  REQUIRE(x.type() == y.type());
  if (x.is_object()) {
    REQUIRE(x.size() == y.size());
    for (auto it = x.begin(); it != x.end(); ++it) {
      REQUIRE(y.contains(it.key()));
      check_close(it.value(), y.at(it.key()), tol, path + "/" + it.key());
    }
  } else if (x.is_array()) {
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      check_close(x[i], y[i], tol, path + "/" + std::to_string(i));
    }
  } else if (x.is_number()) {
    const double a = x.get<double>();
    const double b = y.get<double>();
    CHECK(std::abs(a - b) <= tol * std::max(1.0, std::abs(b)));
  } else {
    CHECK(x == y);
  }
}

} // namespace

TEST_SUITE("parse_csv") {
  TEST_CASE("small file") {
    const auto file = parse_text("group,value\n1,1\n1,2\n2,3\n");
    CHECK(file.values(1) == std::vector<double>{1, 2});
    CHECK(file.values(2) == std::vector<double>{3});
    CHECK(file.rows[2].line == 4);
  }

  TEST_CASE("blank lines, CRLF, spaces and a byte-order mark") {
    const auto file = parse_text("\xEF\xBB\xBFgroup, value\r\n\r\n 1 , -2.5e1 \r\n2,7\r\n\n");
    CHECK(file.values(1) == std::vector<double>{-25.0});
    CHECK(file.values(2) == std::vector<double>{7.0});
  }

  TEST_CASE("errors carry the line") {
    CHECK(parse_error_line("group,value\n1,1\n2,2\n3,1\n") == 4);
    CHECK(parse_error_line("group,value\n1,1\n2,x\n") == 3);
    CHECK(parse_error_line("group,value\n1,1\n2,inf\n") == 3);
    CHECK(parse_error_line("group,value\n1,1\n2,1,5\n") == 3);
    CHECK(parse_error_line("group,value\n1,1\n2,\n") == 3);
    CHECK(parse_error_line("value,group\n1,1\n") == 1);
    CHECK(parse_error_line("\n\n1,1\n") == 3);
    CHECK(parse_error_line("") == 0);
    CHECK(parse_error_line("group,value\n1,1\n1,3\n") == 3);
    try {
      parse_text("group,value\n1,1\n2,2\n3,1\n");
    } catch (const ParseError& e) {
      const std::string what = e.what();
      CHECK(what.find("mem.csv:4") != std::string::npos);
      CHECK(what.find("'3'") != std::string::npos);
    }
  }

  TEST_CASE("fixture files") {
    const auto small = parse_csv_file(fixture("small.csv"));
    CHECK(small.rows.size() == 4);
    CHECK_THROWS_AS(parse_csv_file(fixture("unknown_group.csv")), ParseError);
    CHECK_THROWS_AS(parse_csv_file(fixture("no_header.csv")), ParseError);
    CHECK_THROWS_AS(parse_csv_file(fixture("one_group.csv")), ParseError);
    CHECK_THROWS_AS(parse_csv_file(fixture("bad_value.csv")), ParseError);
    CHECK_THROWS_AS(parse_csv_file(fixture("does_not_exist.csv")), DataError);
  }

  TEST_CASE("bundled ten versus eleven example") {
    const auto file = parse_csv_file(TTBAYES_EXAMPLE_DATA);
    CHECK(file.values(1).size() == 10);
    CHECK(file.values(2).size() == 11);
    const auto test = pooled_t(summarize(file.values(1)), summarize(file.values(2)));
    CHECK(test.v == 19);
    CHECK(test.n_delta == doctest::Approx(110.0 / 21.0).epsilon(1e-15));
  }
}

TEST_SUITE("cli test") {
  TEST_CASE("published example") {
    const auto run = cli({"test", "--t", "1.634", "--n1", "10", "--n2", "11",
                          "--sigma-a", "0.3333333", "--a", "-0.75"});
    REQUIRE(run.status == 0);
    const auto doc = run.doc();
    CHECK(doc["tool"] == "ttbayes");
    CHECK(doc["command"] == "test");
    CHECK(doc["test"]["v"] == 19);
    CHECK(std::abs(doc["gbf"]["bf_10"].get<double>() - 1.264) <= 1e-3);
    CHECK(std::abs(doc["gbf"]["posterior_h1"].get<double>() - 0.558) <= 1e-3);
    CHECK(std::abs(doc["pbf"]["bf_10"].get<double>() - 0.375) <= 1e-3);
    CHECK(std::abs(doc["pbf"]["posterior_h1"].get<double>() - 0.273) <= 1e-3);
    CHECK(std::abs(doc["frequentist"]["p_value"].get<double>() - 0.1187) <= 1e-4);
    CHECK(doc["frequentist"]["reject_h0"] == false);
    CHECK(doc["gbf"]["jeffreys"] == "leans H1");
    CHECK(doc["pbf"]["jeffreys"] == "leans H0");
  }

  TEST_CASE("t = 0") {
    const auto doc = cli({"test", "--t", "0", "--n1", "5", "--n2", "5"}).doc();
    CHECK(doc["frequentist"]["p_value"] == 1.0);
    CHECK(doc["gbf"]["bf_10"].get<double>() < 1.0);
    CHECK(doc["pbf"]["bf_10"].get<double>() < 1.0);
  }

  TEST_CASE("csv format has six significant digits") {
    const auto run = cli({"test", "--t", "1.634", "--n1", "10", "--n2", "11",
                          "--format", "csv"});
    REQUIRE(run.status == 0);
    CHECK(run.out.rfind("field,value\n", 0) == 0);
    CHECK(run.out.find("\nv,19\n") != std::string::npos);
    CHECK(run.out.find("\nn_delta,5.2381\n") != std::string::npos);
    CHECK(run.out.find("\npbf_bf_10,0.374946\n") != std::string::npos);
    CHECK(run.out.find("\np_value,0.11872\n") != std::string::npos);
  }

  TEST_CASE("data file agrees with its own summaries") {
    const auto from_data = cli({"test", "--data", TTBAYES_EXAMPLE_DATA});
    REQUIRE(from_data.status == 0);
    const auto file = parse_csv_file(TTBAYES_EXAMPLE_DATA);
    const auto s1 = summarize(file.values(1));
    const auto s2 = summarize(file.values(2));
    auto full = [](double x) {
      std::ostringstream out;
      out.precision(17);
      out << x;
      return out.str();
    };
    const auto from_moments =
        cli({"test", "--n1", "10", "--n2", "11", "--mean1", full(s1.mean),
             "--mean2", full(s2.mean), "--var1", full(s1.variance), "--var2",
             full(s2.variance)});
    REQUIRE(from_moments.status == 0);
    const auto test = pooled_t(s1, s2);
    const auto from_t =
        cli({"test", "--t", full(test.t), "--n1", "10", "--n2", "11"});
    REQUIRE(from_t.status == 0);

    // Everything except the echoed inputs must agree to 1e-12.
    auto outputs = [](json doc) {
      doc.erase("inputs");
      doc["test"].erase("s_p2");
      return doc;
    };
    check_close(outputs(from_moments.doc()), outputs(from_data.doc()), 1e-12);
    check_close(outputs(from_t.doc()), outputs(from_data.doc()), 1e-12);
    CHECK(std::abs(from_data.doc()["test"]["t"].get<double>() - 1.6340461) <= 1e-7);
  }

  TEST_CASE("record round-trips through JSON") {
    for (const auto& args :
         {std::vector<std::string>{"test", "--t", "1.634", "--n1", "10", "--n2", "11"},
          std::vector<std::string>{"test", "--data", TTBAYES_EXAMPLE_DATA, "--pi0", "0.3"},
          std::vector<std::string>{"test", "--t", "1e200", "--n1", "10", "--n2", "11"},
          std::vector<std::string>{"test", "--n1", "3", "--n2", "4", "--mean1", "1",
                                   "--mean2", "2", "--var1", "0.5", "--var2", "2"}}) {
      std::ostringstream out, err;
      REQUIRE(run_cli(args, out, err) == 0);
      const auto doc = json::parse(out.str());
      const auto record = doc.get<TestRecord>();
      const json again = record;
      CHECK(again == doc);
      CHECK(again.dump(2) + "\n" == out.str());
      const auto twice = again.get<TestRecord>();
      CHECK(twice.inputs == record.inputs);
      CHECK(twice.pbf.log_bf_10 == record.pbf.log_bf_10);
    }
  }

  TEST_CASE("overflowing Bayes factor is written as null") {
    const auto doc = cli({"test", "--t", "1e200", "--n1", "10", "--n2", "11"}).doc();
    CHECK(doc["pbf"]["bf_10"].is_null());
    CHECK(doc["pbf"]["log_bf_10"].get<double>() > 700.0);
    CHECK(doc["pbf"]["posterior_h1"] == 1.0);
  }

  TEST_CASE("exit codes and messages") {
    auto usage = cli({"test", "--n1", "10", "--n2", "11"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--t") != std::string::npos);

    usage = cli({"test", "--t", "1", "--n1", "10"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--n2") != std::string::npos);

    usage = cli({"test", "--t", "1", "--n1", "10", "--n2", "11", "--a", "-1.2"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--a") != std::string::npos);
    CHECK(usage.err.find("(-1, 8.5)") != std::string::npos);

    usage = cli({"test", "--t", "1", "--n1", "10", "--n2", "11", "--pi0", "1"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--pi0") != std::string::npos);

    usage = cli({"test", "--t", "1", "--n1", "10", "--n2", "11", "--sigma-a", "0"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--sigma-a") != std::string::npos);

    usage = cli({"test", "--t", "1", "--n1", "10", "--n2", "11", "--format", "xml"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--format") != std::string::npos);

    usage = cli({"test", "--data", fixture("small.csv"), "--t", "1"});
    CHECK(usage.status == 2);
    CHECK(usage.err.find("--data") != std::string::npos);

    CHECK(cli({"test", "--t", "abc", "--n1", "3", "--n2", "3"}).status == 2);
    CHECK(cli({"frobnicate"}).status == 2);
    CHECK(cli({}).status == 2);

    auto data = cli({"test", "--data", fixture("unknown_group.csv")});
    CHECK(data.status == 3);
    CHECK(data.err.find("unknown_group.csv:4") != std::string::npos);

    data = cli({"test", "--data", fixture("missing.csv")});
    CHECK(data.status == 3);

    data = cli({"test", "--n1", "3", "--n2", "3", "--mean1", "1", "--mean2", "1",
                "--var1", "0", "--var2", "0"});
    CHECK(data.status == 3);

    data = cli({"test", "--t", "1", "--n1", "1", "--n2", "1"});
    CHECK(data.status == 3);

    const auto help = cli({"--help"});
    CHECK(help.status == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    const auto version = cli({"--version"});
    CHECK(version.status == 0);
    CHECK(version.out.find(kToolVersion) != std::string::npos);
  }
}

TEST_SUITE("cli sweep") {
  TEST_CASE("PBF shape sweep") {
    const auto run = cli({"sweep", "--method", "pbf", "--values",
                          "-0.9,-0.8,-0.75,-0.7,-0.6,-0.5", "--t", "1.634",
                          "--n1", "10", "--n2", "11"});
    REQUIRE(run.status == 0);
    const auto doc = run.doc();
    const std::vector<double> bf = {0.177, 0.316, 0.375, 0.429, 0.524, 0.606};
    const auto& rows = doc["sweep"]["rows"];
    REQUIRE(rows.size() == bf.size());
    for (std::size_t i = 0; i < bf.size(); ++i) {
      CHECK(std::abs(rows[i]["result"]["bf_10"].get<double>() - bf[i]) <= 1e-3);
    }
    CHECK(doc["sweep"]["hyperparameter"] == "a");
    const auto table = doc["sweep"].get<study::SweepTable>();
    CHECK(json(table) == doc["sweep"]);
  }

  TEST_CASE("GBF sweep in CSV with an illegal value") {
    const auto run = cli({"sweep", "--method", "gbf", "--values", "0.1,-1,5",
                          "--t", "1.634", "--n1", "10", "--n2", "11", "--format", "csv"});
    REQUIRE(run.status == 0);
    CHECK(run.out.rfind("method,value,log_bf_10,bf_10,posterior_h1,jeffreys,error\n", 0) == 0);
    CHECK(run.out.find("gbf,0.1,") != std::string::npos);
    CHECK(run.out.find("gbf,-1,NA,NA,NA,NA,") != std::string::npos);
    CHECK(run.out.find("gbf,5,") != std::string::npos);
  }

  TEST_CASE("bad method") {
    const auto run = cli({"sweep", "--method", "xyz", "--values", "1", "--t", "1",
                          "--n1", "3", "--n2", "3"});
    CHECK(run.status == 2);
    CHECK(run.err.find("--method") != std::string::npos);
  }
}

TEST_SUITE("cli simulate") {
  TEST_CASE("byte-identical for repeated runs and any thread count") {
    const auto one = cli({"simulate", "--n1", "12", "--n2", "9", "--reps", "700",
                          "--seed", "42", "--delta-min", "-1", "--delta-max", "1",
                          "--delta-step", "0.5", "--threads", "1"});
    REQUIRE(one.status == 0);
    for (const std::string threads : {"1", "2", "7", "0"}) {
      const auto again = cli({"simulate", "--n1", "12", "--n2", "9", "--reps", "700",
                              "--seed", "42", "--delta-min", "-1", "--delta-max", "1",
                              "--delta-step", "0.5", "--threads", threads});
      CHECK(again.out == one.out);
    }
    const auto doc = one.doc();
    CHECK(doc["seed"] == 42);
    REQUIRE(doc["curves"].size() == 3);
    CHECK(doc["curves"][0]["delta"] == json({-1.0, -0.5, 0.0, 0.5, 1.0}));
    CHECK(doc["curves"][1]["method"]["label"] == "PBF(a=-0.75)");
    for (const auto& c : doc["curves"]) {
      const auto curve = c.get<study::RejectionCurve>();
      CHECK(json(curve) == c);
    }
  }

  TEST_CASE("method parameters and CSV") {
    const auto run = cli({"simulate", "--n1", "10", "--n2", "10", "--reps", "200",
                          "--seed", "3", "--delta-min", "0", "--delta-max", "0.2",
                          "--method", "gbf:0.1,pbf:-0.9", "--method", "pvalue:0.01",
                          "--format", "csv"});
    REQUIRE(run.status == 0);
    CHECK(run.out.rfind("method,n1,n2,delta,rejections,replications,frequency\n", 0) == 0);
    CHECK(run.out.find("GBF(sigma_a=0.1),10,10,0,") != std::string::npos);
    CHECK(run.out.find("PBF(a=-0.9),10,10,0.1,") != std::string::npos);
    CHECK(run.out.find("P-VALUE(alpha=0.01),10,10,0.2,") != std::string::npos);
  }

  TEST_CASE("usage errors") {
    auto run = cli({"simulate", "--n1", "10", "--n2", "10"});
    CHECK(run.status == 2);
    CHECK(run.err.find("--seed") != std::string::npos);
    run = cli({"simulate", "--n1", "10", "--n2", "10", "--seed", "1", "--method", "pbf:-2"});
    CHECK(run.status == 2);
    CHECK(run.err.find("--method") != std::string::npos);
    run = cli({"simulate", "--n1", "10", "--n2", "10", "--seed", "1", "--method", "zzz"});
    CHECK(run.status == 2);
    run = cli({"simulate", "--n1", "1", "--n2", "1", "--seed", "1"});
    CHECK(run.status == 2);
    run = cli({"simulate", "--n1", "10", "--n2", "10", "--seed", "1", "--reps", "0"});
    CHECK(run.status == 2);
    CHECK(run.err.find("--reps") != std::string::npos);
    run = cli({"simulate", "--n1", "10", "--n2", "10", "--seed", "1", "--delta-step", "0"});
    CHECK(run.status == 2);
    CHECK(run.err.find("--delta-step") != std::string::npos);
  }

  TEST_CASE("parse_method") {
    using study::parse_method;
    CHECK(parse_method("gbf", 0.5, -0.75, 0.05) == study::TestMethod::gbf(0.5));
    CHECK(parse_method("pbf:-0.6", 0.5, -0.75, 0.05) == study::TestMethod::pbf(-0.6));
    CHECK(parse_method("pvalue", 0.5, -0.75, 0.01) == study::TestMethod::p_value(0.01));
    CHECK_THROWS_AS(parse_method("pbf:x", 0.5, -0.75, 0.05), UsageError);
    CHECK_THROWS_AS(parse_method("bf", 0.5, -0.75, 0.05), UsageError);
  }
}

TEST_SUITE("cli curves") {
  TEST_CASE("prior density") {
    const auto run = cli({"curves", "--kind", "prior", "--n1", "10", "--n2", "10"});
    REQUIRE(run.status == 0);
    const auto series = run.doc()["series"];
    REQUIRE(series.size() == 1);
    const auto curve = series[0].get<study::CurveSeries>();
    CHECK(curve.x.size() == 500);
    CHECK(curve.x_label == "sigma_a^2");
    CHECK(json(curve) == series[0]);
  }

  TEST_CASE("Bayes factor against hyperparameters and t") {
    auto run = cli({"curves", "--kind", "bf-vs-hyper", "--n1", "10", "--n2", "10"});
    REQUIRE(run.status == 0);
    CHECK(run.doc()["series"].size() == 2);
    run = cli({"curves", "--kind", "bf-vs-hyper", "--n1", "10", "--n2", "10",
               "--method", "gbf", "--x-max", "10000", "--points", "41"});
    REQUIRE(run.status == 0);
    const auto gbf = run.doc()["series"][0].get<study::CurveSeries>();
    CHECK(gbf.x.size() == 41);
    CHECK(gbf.y.back() < 1.0);
    run = cli({"curves", "--kind", "bf-vs-t", "--n1", "10", "--n2", "10",
               "--format", "csv"});
    REQUIRE(run.status == 0);
    CHECK(run.out.rfind("series,x,y\n", 0) == 0);
  }

  TEST_CASE("errors") {
    CHECK(cli({"curves", "--kind", "pie", "--n1", "10", "--n2", "10"}).status == 2);
    const auto bad_a = cli({"curves", "--kind", "prior", "--n1", "1", "--n2", "2", "--a", "-0.5"});
    CHECK(bad_a.status == 2);
    CHECK(bad_a.err.find("--a") != std::string::npos);
    CHECK(cli({"curves", "--kind", "bf-vs-hyper", "--n1", "10", "--n2", "10",
               "--points", "41"}).status == 2);
  }
}
