// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "evocalc/error.hpp"

namespace evo {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  size_t used = 0;
  const double v = std::stod(s, &used);
  require(used == s.size(), ErrorCode::Io, "report csv: bad number '" + s + "'");
  return v;
}

nlohmann::json num_json(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

}  // namespace

std::string verdict_le(double value, double tol) { return value <= tol ? "pass" : "fail"; }

void ConvergenceReport::add_row(ReportRow r) { rows_.push_back(std::move(r)); }

bool ConvergenceReport::check(const std::string& name, double value, const std::string& relation,
                              double threshold) {
  require(relation == "<=" || relation == ">=", ErrorCode::InvalidArgument, "report check: bad relation");
  const bool ok = relation == "<=" ? value <= threshold : value >= threshold;
  checks_.push_back({name, value, threshold, relation, ok});
  return ok;
}

bool ConvergenceReport::passed() const {
  bool gated = !checks_.empty();
  for (const auto& r : rows_) {
    if (r.verdict == "fail") return false;
    if (r.verdict == "pass") gated = true;
  }
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return gated;
}

std::vector<std::string> ConvergenceReport::failures() const {
  std::vector<std::string> out;
  for (const auto& r : rows_)
    if (r.verdict == "fail")
      out.push_back("row scale=" + fmt(r.scale) + (r.label.empty() ? "" : " (" + r.label + ")") +
                    " pairing=" + fmt(r.pairing_error) + " strong=" + fmt(r.strong_error) +
                    " norm=" + fmt(r.norm_error) + " bound=" + fmt(r.bound_rhs));
  for (const auto& c : checks_)
    if (!c.pass) out.push_back("check " + c.name + ": " + fmt(c.value) + " not " + c.relation + " " + fmt(c.threshold));
  if (out.empty() && !passed()) out.push_back("no gated rows or checks");
  return out;
}

std::string ConvergenceReport::to_csv() const {
  std::vector<ReportRow> sorted = rows_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ReportRow& a, const ReportRow& b) { return a.scale < b.scale; });
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : sorted)
    os << fmt(r.scale) << ',' << fmt(r.pairing_error) << ',' << fmt(r.strong_error) << ',' << fmt(r.norm_error)
       << ',' << fmt(r.bound_rhs) << ',' << r.verdict << '\n';
  return os.str();
}

std::vector<ReportRow> ConvergenceReport::parse_csv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line == kCsvHeader, ErrorCode::Io, "report csv: bad header");
  std::vector<ReportRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    require(f.size() == 6, ErrorCode::Io, "report csv: expected 6 fields in '" + line + "'");
    ReportRow r;
    r.scale = parse_num(f[0]);
    r.pairing_error = parse_num(f[1]);
    r.strong_error = parse_num(f[2]);
    r.norm_error = parse_num(f[3]);
    r.bound_rhs = parse_num(f[4]);
    r.verdict = f[5];
    rows.push_back(r);
  }
  return rows;
}

std::string ConvergenceReport::to_json(int indent) const {
  // Rows come from the CSV text; labels are matched back by sorted position.
  std::vector<ReportRow> labelled = rows_;
  std::stable_sort(labelled.begin(), labelled.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.scale < b.scale; });
  const std::vector<ReportRow> rows = parse_csv(to_csv());
  nlohmann::ordered_json j;
  j["experiment"] = experiment_;
  j["seed"] = seed_;
  j["rows"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    nlohmann::ordered_json row;
    row["scale"] = num_json(r.scale);
    row["pairing_error"] = num_json(r.pairing_error);
    row["strong_error"] = num_json(r.strong_error);
    row["norm_error"] = num_json(r.norm_error);
    row["bound_rhs"] = num_json(r.bound_rhs);
    row["verdict"] = r.verdict;
    if (!labelled[i].label.empty()) row["label"] = labelled[i].label;
    j["rows"].push_back(row);
  }
  j["verdict"] = passed() ? "pass" : "fail";
  j["runtime_seconds"] = runtime_;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks_)
    j["checks"].push_back({{"name", c.name},
                           {"value", num_json(c.value)},
                           {"relation", c.relation},
                           {"threshold", num_json(c.threshold)},
                           {"pass", c.pass}});
  if (!metadata_.empty()) j["metadata"] = metadata_;
  return j.dump(indent);
}

}  // namespace evo
