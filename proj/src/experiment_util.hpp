// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "evocalc/experiments.hpp"
#include "evocalc/homogenization.hpp"

namespace evo::detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Adds one row per scale; only the last row is gated against final_tol, the rest carry "-".
/// With slope_tol set, the log-log slope of the error column over the scales is checked too.
inline void add_decay_rows(ConvergenceReport& rep, const std::vector<double>& scales,
                           const std::vector<TopologyErrors>& errs, const std::vector<double>& primary,
                           double final_tol, std::optional<double> slope_tol, const std::string& what) {
  for (size_t i = 0; i < scales.size(); ++i) {
    ReportRow r;
    r.scale = scales[i];
    r.pairing_error = errs[i].weak;
    r.strong_error = errs[i].strong;
    r.norm_error = errs[i].norm;
    r.bound_rhs = final_tol;
    r.verdict = i + 1 == scales.size() ? verdict_le(primary[i], final_tol) : "-";
    rep.add_row(r);
  }
  rep.check(what + " at final scale", primary.back(), "<=", final_tol);
  if (slope_tol && scales.size() >= 2) {
    bool positive = true;
    for (double v : primary) positive = positive && v > 0;
    const double s = positive ? loglog_slope(scales, primary) : -INFINITY;
    rep.check(what + " log-log slope", s, "<=", *slope_tol);
  }
}

/// Weak and strong errors from one application of each operator per probe; norm is the
/// strong value (a probe lower estimate).
inline TopologyErrors pairing_errors(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes,
                                     const ProbeSet& tests, double nu) {
  TopologyErrors e;
  for (const auto& p : probes.probes()) {
    const Signal phi = p.with_nu(nu);
    const double pn = norm_nu(phi, nu);
    if (pn == 0.0) continue;
    const Signal d = s_n(phi) - s_lim(phi);
    e.strong = std::max(e.strong, norm_nu(d, nu) / pn);
    for (const auto& q : tests.probes()) {
      const double qn = norm_nu(q, nu);
      if (qn > 0) e.weak = std::max(e.weak, std::abs(inner_nu(q.with_nu(nu), d, nu)) / (pn * qn));
    }
  }
  e.norm = e.strong;
  e.norm_lower_estimate = true;
  return e;
}

/// Topology ordering norm >= strong >= weak (with relative slack for rounding).
inline void check_ordering(ConvergenceReport& rep, const std::vector<TopologyErrors>& errs) {
  double worst = 0.0;
  for (const auto& e : errs) {
    const double scale = std::max({e.norm, e.strong, e.weak, 1e-300});
    worst = std::max(worst, (e.strong - e.norm) / scale);
    worst = std::max(worst, (e.weak - e.strong) / scale);
  }
  rep.check("topology ordering violation", worst, "<=", 1e-9);
}

}  // namespace evo::detail
