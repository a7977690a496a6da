// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "evocalc/error.hpp"
#include "evocalc/experiments.hpp"
#include "evocalc/report.hpp"

using namespace evo;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    (void)ExperimentConfig::parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

const char* kTransfer = "experiment = transfer\nt_end = 10\nscales = 100, 200\ntol.final = 0.01\n";

}  // namespace

TEST_CASE("config parsing accepts the documented keys") {
  const ExperimentConfig c = ExperimentConfig::parse(
      "# comment\nexperiment = dbf\n dt = 0.5  # trailing\nscales = 8, 16\ntol.final = 0.02\nparam.oracle = harmonic\n"
      "seed = 7\nexpect = fail\noutput = out/x\n");
  CHECK(c.experiment == "dbf");
  CHECK(*c.dt == 0.5);
  CHECK(c.scales->size() == 2);
  CHECK(c.tol.at("final") == 0.02);
  CHECK(c.param.at("oracle") == "harmonic");
  CHECK(c.seed == 7);
  CHECK(c.expect_fail);
  CHECK(c.output == "out/x");
}

TEST_CASE("config errors are reported as config errors") {
  CHECK(parse_code("experiment = dbf\nscales =\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\nscales = 1,,2\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\nbogus = 1\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = nope\n") == ErrorCode::Config);
  CHECK(parse_code("dt = 0.1\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\ndt = 0.1\ndt = 0.2\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\ndt = abc\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\ndt = -1\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\nexpect = maybe\n") == ErrorCode::Config);
  CHECK(parse_code("experiment = dbf\nno equals sign\n") == ErrorCode::Config);
  CHECK_THROWS_AS(make_context(ExperimentConfig::parse("experiment = dbf\nscales = 4, 2\n")), Error);
}

TEST_CASE("every experiment has defaults") {
  for (const auto& name : experiment_names()) CHECK_FALSE(experiment_defaults(name).scales.empty());
}

TEST_CASE("report verdicts need a gate and fail on any failing row or check") {
  ConvergenceReport r("x", 1);
  r.add_row({1.0, 0.1, 0.2, 0.3, 0.5, "-", ""});
  CHECK_FALSE(r.passed());
  r.add_row({2.0, 0.01, 0.02, 0.03, 0.5, "pass", ""});
  CHECK(r.passed());
  r.check("c", 2.0, "<=", 1.0);
  CHECK_FALSE(r.passed());
  CHECK(r.failures().size() == 1);
}

TEST_CASE("CSV is sorted, round-trips, and feeds the JSON") {
  ConvergenceReport r("x", 3);
  r.add_row({4.0, 0.1, std::nan(""), INFINITY, 1.0 / 3.0, "pass", "b"});
  r.add_row({2.0, 0.5, 0.25, 0.125, 0.0, "-", "a"});
  const std::string csv = r.to_csv();
  CHECK(csv.rfind(ConvergenceReport::kCsvHeader, 0) == 0);
  const auto rows = ConvergenceReport::parse_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].scale == 2.0);
  CHECK(rows[1].bound_rhs == 1.0 / 3.0);
  CHECK(std::isnan(rows[1].strong_error));
  CHECK(std::isinf(rows[1].norm_error));
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["experiment"] == "x");
  CHECK(j["seed"] == 3);
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0]["label"] == "a");
  CHECK(j["rows"][1]["strong_error"] == "nan");
  CHECK(j["verdict"] == "pass");
  CHECK(j.contains("runtime_seconds"));
}

TEST_CASE("runs are bit-identical and JSON rows equal CSV rows") {
  const ExperimentConfig cfg = ExperimentConfig::parse(kTransfer);
  const ConvergenceReport a = run_experiment(cfg), b = run_experiment(cfg);
  CHECK(a.to_csv() == b.to_csv());
  const auto rows = ConvergenceReport::parse_csv(a.to_csv());
  const auto j = nlohmann::json::parse(a.to_json());
  REQUIRE(j["rows"].size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(j["rows"][i]["scale"].get<double>() == rows[i].scale);
    CHECK(j["rows"][i]["strong_error"].get<double>() == rows[i].strong_error);
    CHECK(j["rows"][i]["verdict"] == rows[i].verdict);
  }
  CHECK(a.passed());
}

TEST_CASE("suite runs configs in filename order and honours expect = fail") {
  const fs::path dir = fs::temp_directory_path() / "evocalc_suite_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "a_pass.conf") << kTransfer;
  std::ofstream(dir / "b_control.conf") << "experiment = transfer\nt_end = 10\nscales = 100, 200\ntol.final = 1e-12\nexpect = fail\n";
  SuiteResult s = suite_all(dir.string(), std::nullopt);
  REQUIRE(s.configs.size() == 2);
  CHECK(s.configs[0] == "a_pass.conf");
  CHECK(s.configs[1] == "b_control.conf");
  CHECK(s.ok);
  CHECK(fs::exists(dir / "reports" / "a_pass.csv"));
  CHECK(fs::exists(dir / "reports" / "suite.json"));
  std::ofstream(dir / "c_broken.conf") << "experiment = transfer\nscales =\n";
  s = suite_all(dir.string(), std::nullopt);
  CHECK_FALSE(s.ok);
  CHECK(s.errors.count("c_broken.conf") == 1);
  fs::remove_all(dir);
}
