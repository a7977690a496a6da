// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

// Runs the shipped experiment configs and re-gates their report rows against pinned
// thresholds, one PASS/FAIL line per acceptance check.
//
//   evocalc_acceptance <configs-dir> <report-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "evocalc/experiments.hpp"

using namespace evo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Runner {
 public:
  Runner(fs::path configs, fs::path out) : configs_(std::move(configs)), out_(std::move(out)) {}

  const ConvergenceReport& get(const std::string& stem) {
    auto it = cache_.find(stem);
    if (it != cache_.end()) return it->second;
    const ExperimentConfig cfg = ExperimentConfig::load((configs_ / (stem + ".conf")).string());
    RunResult r = run_and_write(cfg, (out_ / stem).string());
    return cache_.emplace(stem, std::move(r.report)).first->second;
  }

 private:
  fs::path configs_, out_;
  std::map<std::string, ConvergenceReport> cache_;
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Least-squares slope of log y against log x, computed here rather than by the library.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0)) return INFINITY;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const ReportCheck* find_check(const ConvergenceReport& r, const std::string& prefix) {
  for (const auto& c : r.checks())
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

std::vector<const ReportCheck*> find_checks(const ConvergenceReport& r, const std::string& needle) {
  std::vector<const ReportCheck*> out;
  for (const auto& c : r.checks())
    if (c.name.find(needle) != std::string::npos) out.push_back(&c);
  return out;
}

const ReportRow* row_at(const ConvergenceReport& r, double scale, const std::string& label = "") {
  for (const auto& row : r.rows())
    if (std::abs(row.scale - scale) <= 1e-12 * std::max(1.0, scale) && (label.empty() || row.label == label)) return &row;
  return nullptr;
}

// Final-scale error within tol and log-log slope at most max_slope, on the given column.
Outcome weak_limit(const ConvergenceReport& r, double final_scale, double tol, double max_slope,
                   double ReportRow::*col) {
  const ReportRow* last = row_at(r, final_scale);
  if (!last) return {false, "no row at scale " + g(final_scale)};
  std::vector<double> x, y;
  for (const auto& row : r.rows()) {
    x.push_back(row.scale);
    y.push_back(row.*col);
  }
  const double s = slope(x, y);
  return {last->*col <= tol && s <= max_slope,
          "final " + g(last->*col) + " (<= " + g(tol) + "), slope " + g(s) + " (<= " + g(max_slope) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <configs-dir> <report-dir>\n", argv[0]);
    return 2;
  }
  Runner run(argv[1], argv[2]);
  constexpr double kLimit = 60.0;

  struct Item {
    const char* title;
    std::vector<std::string> stems;
    std::function<Outcome()> eval;
  };
  const std::vector<Item> items = {
      {"antiderivative norm <= 1/nu + 0.02 for nu in {0.5, 1, 2}", {"01_spectrum"},
       [&] {
         const auto& r = run.get("01_spectrum");
         Outcome o{true, ""};
         for (double nu : {0.5, 1.0, 2.0}) {
           const ReportRow* row = row_at(r, nu);
           const bool ok = row && row->norm_error <= 1.0 / nu + 0.02;
           o.pass = o.pass && ok;
           o.detail += "nu=" + g(nu) + ": " + (row ? g(row->norm_error) : "missing") + "  ";
         }
         return o;
       }},
      {"symbol on circle to 1e-12, cumsum vs FFT <= 1e-3", {"01_spectrum"},
       [&] {
         const auto& r = run.get("01_spectrum");
         double circle = 0, fft = 0;
         for (const auto& row : r.rows()) {
           circle = std::max(circle, row.pairing_error);
           fft = std::max(fft, row.strong_error);
         }
         return Outcome{!r.rows().empty() && circle <= 1e-12 && fft <= 1e-3,
                        "circle " + g(circle) + ", fft " + g(fft)};
       }},
      {"Re<d phi, phi> = nu |phi|^2 within 2% on 20 smooth probes", {"01_spectrum"},
       [&] {
         const auto cs = find_checks(run.get("01_spectrum"), "accretivity identity");
         double worst = 0;
         for (const auto* c : cs) worst = std::max(worst, c->value);
         return Outcome{cs.size() == 3 && worst <= 0.02, "worst relative deviation " + g(worst)};
       }},
      {"ODE routes agree to 1e-6, residual estimate holds with 5%", {"02_ode_block"},
       [&] {
         const auto& r = run.get("02_ode_block");
         const ReportRow* row20 = row_at(r, 20.0);
         bool ok = row20 != nullptr;
         double disc = 0, ratio = 0;
         for (const auto& row : r.rows()) {
           disc = std::max(disc, row.pairing_error);
           ratio = std::max(ratio, row.norm_error / row.bound_rhs);
         }
         ok = ok && disc <= 1e-6 && ratio <= 1.05;
         return Outcome{ok, "route discrepancy " + g(disc) + ", lhs/bound " + g(ratio)};
       }},
      {"Picard vs RK4 <= 1e-3 at dt = 1e-3", {"03_picard"},
       [&] {
         const ReportRow* row = row_at(run.get("03_picard"), 1000.0);
         return Outcome{row && row->strong_error <= 1e-3, row ? "sup relative error " + g(row->strong_error) : "missing"};
       }},
      {"causality defect <= 1e-10 for every solver, anti-causal control > 0.1", {"05_causality"},
       [&] {
         const auto& r = run.get("05_causality");
         double worst = 0;
         for (const auto& row : r.rows()) worst = std::max(worst, row.pairing_error);
         const ReportCheck* c = find_check(r, "anti-causal shift control");
         const bool ok = r.rows().size() >= 7 && worst <= 1e-10 && c && c->value > 0.1;
         return Outcome{ok, std::to_string(r.rows().size()) + " solvers, worst " + g(worst) + ", control " +
                                (c ? g(c->value) : "missing")};
       }},
      {"nu-independence (nu vs 2 nu) <= 10 dt", {"05_causality"},
       [&] {
         const auto& r = run.get("05_causality");
         const double tol = 10 * 0.01;
         double worst = 0;
         for (const auto& row : r.rows()) worst = std::max(worst, row.strong_error);
         const ReportCheck* m = find_check(r, "multiplier nu-independence");
         if (m) worst = std::max(worst, m->value);
         return Outcome{m && worst <= tol, "worst " + g(worst)};
       }},
      {"sin(2 pi n t): weak <= 0.02 at n = 64, strong within 10% of 1/sqrt(2)", {"07_timprod_sine"},
       [&] {
         const auto& r = run.get("07_timprod_sine");
         Outcome o = weak_limit(r, 64.0, 0.02, -0.5, &ReportRow::pairing_error);
         const ReportRow* row = row_at(r, 64.0);
         const double target = 1.0 / std::numbers::sqrt2;
         const bool band = row && std::abs(row->strong_error - target) <= 0.1 * target;
         o.pass = o.pass && band;
         o.detail += ", strong " + (row ? g(row->strong_error) : std::string("missing"));
         return o;
       }},
      {"product of means (k = 2): final <= 0.02, slope <= -0.5", {"06_timprod"},
       [&] { return weak_limit(run.get("06_timprod"), 64.0, 0.02, -0.5, &ReportRow::pairing_error); }},
      {"DBF with eps = 2 + sin pairs against sqrt(3) <= 0.02; arithmetic control >= 0.1",
       {"08_dbf", "09_dbf_arithmetic_control"},
       [&] {
         Outcome o = weak_limit(run.get("08_dbf"), 64.0, 0.02, -0.5, &ReportRow::pairing_error);
         const ReportRow* c = row_at(run.get("09_dbf_arithmetic_control"), 64.0);
         const bool sep = c && c->pairing_error >= 5 * 0.02;
         o.pass = o.pass && sep;
         o.detail += ", control " + (c ? g(c->pairing_error) : std::string("missing"));
         return o;
       }},
      {"memory kernel limit <= 0.02 at eps = 1/64", {"10_memory_kernel"},
       [&] { return weak_limit(run.get("10_memory_kernel"), 64.0, 0.02, -0.5, &ReportRow::pairing_error); }},
      {"eddy current: lhs <= bound + 10% on all rows, slope <= -0.9", {"11_eddy"},
       [&] {
         const auto& r = run.get("11_eddy");
         std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by;
         double ratio = 0;
         for (const auto& row : r.rows()) {
           ratio = std::max(ratio, row.norm_error / row.bound_rhs);
           by[row.label].first.push_back(row.scale);
           by[row.label].second.push_back(row.norm_error);
         }
         bool ok = !by.empty() && ratio <= 1.1;
         std::string d = "lhs/bound " + g(ratio);
         for (const auto& [label, xy] : by) {
           const double s = slope(xy.first, xy.second);
           ok = ok && s <= -0.9 && xy.first.size() == 4;
           d += ", " + label + " slope " + g(s);
         }
         return Outcome{ok, d};
       }},
      {"heat: strong error -> 0, final <= 0.02; Re a^-1 >= c/|a|^2 to 1e-10", {"12_heat"},
       [&] {
         const auto& r = run.get("12_heat");
         bool mono = true;
         for (size_t i = 1; i < r.rows().size(); ++i) mono = mono && r.rows()[i].strong_error < r.rows()[i - 1].strong_error;
         const double last = r.rows().empty() ? INFINITY : r.rows().back().strong_error;
         const ReportCheck* inv = find_check(r, "min(Re a^-1");
         return Outcome{mono && last <= 0.02 && inv && inv->value >= -1e-10,
                        "final " + g(last) + (mono ? ", decreasing" : ", not decreasing") + ", inverse bound margin " +
                            (inv ? g(inv->value) : "missing")};
       }},
      {"wave: final pairing <= 0.05 at eps = 1/64, elliptic ladder <= 0.05", {"13_wave"},
       [&] {
         const auto& r = run.get("13_wave");
         Outcome o = weak_limit(r, 64.0, 0.05, -0.5, &ReportRow::pairing_error);
         const ReportCheck* l = find_check(r, "elliptic ladder");
         o.pass = o.pass && l && l->value <= 0.05;
         o.detail += ", ladder " + (l ? g(l->value) : std::string("missing"));
         return o;
       }},
      {"difference identity <= 1e-6, norm estimate holds with 5%", {"14_funid"},
       [&] {
         const auto& r = run.get("14_funid");
         double res = 0, ratio = 0;
         for (const auto& row : r.rows()) {
           res = std::max(res, row.pairing_error);
           ratio = std::max(ratio, row.norm_error / row.bound_rhs);
         }
         return Outcome{r.rows().size() >= 3 && res <= 1e-6 && ratio <= 1.05,
                        "residual " + g(res) + ", lhs/rhs " + g(ratio)};
       }},
      {"transfer functions: 1, 1/z, exp(-z) within 1e-3 at z in {1, 1+i, 2}", {"04_transfer"},
       [&] {
         const ReportRow* row = row_at(run.get("04_transfer"), 1000.0);
         if (!row) return Outcome{false, "no dt = 1e-3 row"};
         return Outcome{std::max({row->pairing_error, row->strong_error, row->norm_error}) <= 1e-3,
                        "identity " + g(row->pairing_error) + ", antiderivative " + g(row->strong_error) + ", shift " +
                            g(row->norm_error)};
       }},
  };

  int failed = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    Outcome o;
    double runtime = 0;
    try {
      o = it.eval();
      for (const auto& s : it.stems) runtime = std::max(runtime, run.get(s).runtime_seconds());
      if (runtime > kLimit) {
        o.pass = false;
        o.detail += ", runtime over " + g(kLimit) + " s";
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu  %s  [%s] (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, it.title, o.detail.c_str(), runtime);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance checks passed\n", items.size() - failed, items.size());
  return failed == 0 ? 0 : 1;
}
