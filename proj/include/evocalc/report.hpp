// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace evo {

/// One refinement level.  verdict is "pass", "fail" or "-" (informational row).
struct ReportRow {
  double scale = 0.0;
  double pairing_error = 0.0;
  double strong_error = 0.0;
  double norm_error = 0.0;
  double bound_rhs = 0.0;
  std::string verdict = "-";
  /// Optional tag kept in the JSON summary only (e.g. "eta=2").
  std::string label;
};

/// Scalar gate that is not a table row (slopes, oracle spot values, defects).
struct ReportCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=" or ">=".
  std::string relation = "<=";
  bool pass = false;
};

class ConvergenceReport {
 public:
  static constexpr const char* kCsvHeader = "scale,pairing_error,strong_error,norm_error,bound_rhs,verdict";

  ConvergenceReport() = default;
  ConvergenceReport(std::string experiment, std::uint64_t seed) : experiment_(std::move(experiment)), seed_(seed) {}

  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<ReportRow>& rows() const { return rows_; }
  const std::vector<ReportCheck>& checks() const { return checks_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  double runtime_seconds() const { return runtime_; }

  void add_row(ReportRow r);
  /// Records value relation threshold and returns whether it holds.
  bool check(const std::string& name, double value, const std::string& relation, double threshold);
  void set_meta(const std::string& key, const std::string& value) { metadata_[key] = value; }
  void set_runtime(double seconds) { runtime_ = seconds; }

  /// True when no row says "fail", every check holds and at least one gate exists.
  bool passed() const;
  /// Human readable list of failing rows and checks.
  std::vector<std::string> failures() const;

  /// Rows sorted by scale (stable), values printed with 17 significant digits.
  std::string to_csv() const;
  /// {experiment, seed, rows, verdict, runtime_seconds, checks, metadata}; rows are read back from to_csv().
  std::string to_json(int indent = 2) const;

  static std::vector<ReportRow> parse_csv(const std::string& csv);

 private:
  std::string experiment_;
  std::uint64_t seed_ = 0;
  std::vector<ReportRow> rows_;
  std::vector<ReportCheck> checks_;
  std::map<std::string, std::string> metadata_;
  double runtime_ = 0.0;
};

/// "pass" when value <= tol, "fail" otherwise; NaN fails.
std::string verdict_le(double value, double tol);

}  // namespace evo
