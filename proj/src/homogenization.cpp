// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/homogenization.hpp"

#include <cmath>
#include <limits>

namespace evo {

double weak_pairing_error(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes, double nu,
                          const ProbeSet* tests) {
  const ProbeSet& psi = tests ? *tests : probes;
  require(psi.dim() == s_n.dim_out(), ErrorCode::DimMismatch, "weak_pairing_error: test functions have another dim");
  double worst = 0.0;
  for (const auto& p : probes.probes()) {
    const Signal phi = p.with_nu(nu);
    const double pn = norm_nu(phi, nu);
    if (pn == 0.0) continue;
    const Signal d = s_n(phi) - s_lim(phi);
    for (const auto& q : psi.probes()) {
      const double qn = norm_nu(q, nu);
      if (qn == 0.0) continue;
      worst = std::max(worst, std::abs(inner_nu(q.with_nu(nu), d, nu)) / (pn * qn));
    }
  }
  return worst;
}

double strong_error(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes, double nu) {
  double worst = 0.0;
  for (const auto& p : probes.probes()) {
    const Signal phi = p.with_nu(nu);
    const double pn = norm_nu(phi, nu);
    if (pn == 0.0) continue;
    worst = std::max(worst, norm_nu(s_n(phi) - s_lim(phi), nu) / pn);
  }
  return worst;
}

TopologyErrors topology_errors(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes, double nu,
                               const ProbeSet* tests) {
  TopologyErrors e;
  e.weak = weak_pairing_error(s_n, s_lim, probes, nu, tests);
  e.strong = strong_error(s_n, s_lim, probes, nu);
  const NormEstimate n = op_norm(add(s_n, s_lim, -1.0), nu, probes.with_nu(nu));
  e.norm = std::max(n.value, e.strong);
  e.norm_lower_estimate = n.lower_estimate;
  return e;
}

double OscillatoryFamily::periodicity_defect(Index samples) const {
  double d = 0.0;
  for (Index i = 0; i < samples; ++i) {
    const double y = static_cast<double>(i) / static_cast<double>(samples - 1);
    d = std::max(d, std::abs(base(y + 1.0) - base(y)));
  }
  return d;
}

Complex OscillatoryFamily::mean(Index samples) const {
  Complex acc = 0.0;
  for (Index i = 0; i < samples; ++i) acc += base(static_cast<double>(i) / static_cast<double>(samples));
  return acc / static_cast<double>(samples);
}

Complex OscillatoryFamily::harmonic_mean(Index samples) const {
  Complex acc = 0.0;
  for (Index i = 0; i < samples; ++i) {
    const Complex v = base(static_cast<double>(i) / static_cast<double>(samples));
    require(std::abs(v) > 0, ErrorCode::InvalidArgument, "harmonic_mean: profile vanishes");
    acc += 1.0 / v;
  }
  return static_cast<double>(samples) / acc;
}

double OscillatoryFamily::min_real(Index samples) const {
  double lo = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < samples; ++i) lo = std::min(lo, base(static_cast<double>(i) / static_cast<double>(samples)).real());
  return lo;
}

CausalOp oscillatory_multiplication(const Profile& a, double n, Index dim) {
  return multiply_op(Coefficient::scalar_time([a, n](double t) { return a(n * t); }, dim))
      .with_name("oscillatory multiplication");
}

CausalOp product_operator(const std::vector<Profile>& a, double n) {
  require(!a.empty(), ErrorCode::InvalidArgument, "product_operator: need k >= 1 profiles");
  CausalOp op = oscillatory_multiplication(a.back(), n);
  for (size_t j = a.size() - 1; j-- > 0;) op = compose(oscillatory_multiplication(a[j], n), compose(antiderivative_op(1), op));
  return op.with_name("oscillatory product");
}

CausalOp product_limit(const std::vector<Profile>& a, Index samples) {
  require(!a.empty(), ErrorCode::InvalidArgument, "product_limit: need k >= 1 profiles");
  Complex prod = 1.0;
  for (const auto& f : a) prod *= OscillatoryFamily{f, {}}.mean(samples);
  CausalOp op = identity_op(1);
  for (size_t j = 1; j < a.size(); ++j) op = compose(antiderivative_op(1), op);
  return scale_op(op, prod).with_name("product of means");
}

std::vector<ScaleRow> product_mean_limit(const std::vector<Profile>& a, const std::vector<double>& scales,
                                         const ProbeSet& probes, double nu) {
  const CausalOp lim = product_limit(a);
  std::vector<ScaleRow> rows;
  for (double n : scales) rows.push_back({n, topology_errors(product_operator(a, n), lim, probes, nu)});
  return rows;
}

WeakLimitResult ode_weak_limit_equation(const WeakLimitInputs& in) {
  require(in.theta >= 0 && in.theta < 1, ErrorCode::PreconditionFailed, "weak limit: theta must lie in [0, 1)");
  require(in.c > 0, ErrorCode::InvalidArgument, "weak limit: c must be positive");
  WeakLimitResult out;
  const Index dim = in.O_inv.dim_in();
  CausalOp sum_p = zero_op(dim, dim);
  for (const auto& p : in.P) sum_p = add(sum_p, p);
  const double cert_bound = in.theta / (in.c * (1.0 - in.theta));
  if (in.probes && !in.P.empty()) {
    out.certificate = probe_sup(sum_p, in.probes->grid().nu, *in.probes);
    require(out.certificate <= cert_bound * 1.02 + 1e-14, ErrorCode::PreconditionFailed,
            "weak limit: ||sum P_k|| certificate fails on probes");
  }
  out.q = cert_bound * in.o_inv_norm;
  require(out.q < 1.0, ErrorCode::PreconditionFailed, "weak limit: R does not contract");
  out.terms = in.P.empty() ? 0 : neumann_terms(out.q, in.tol, 1.0);
  const CausalOp o_inv = in.O_inv;
  const Index L = out.terms;
  const std::vector<CausalOp> P = in.P;
  auto R = [P, o_inv](const Signal& y) {
    const Signal z = o_inv(y);
    Signal acc(y.grid(), y.dim());
    for (const auto& p : P) acc -= p(z);
    return acc;
  };
  auto series = [R, L](const Signal& phi, bool include_identity) {
    Signal y = phi;
    Signal acc = include_identity ? phi : Signal(phi.grid(), phi.dim());
    for (Index l = 0; l < L; ++l) {
      y = R(y);
      acc += y;
    }
    return acc;
  };
  if (!in.commuting) {
    out.M_inf = CausalOp(dim, dim, [o_inv, series](const Signal& phi) { return o_inv(series(phi, true)); },
                         {true, false}, {}, "M_inf");
  } else {
    out.M_inf = o_inv.with_name("M_inf");
    out.N_inf = CausalOp(dim, dim, [o_inv, series](const Signal& phi) { return o_inv(series(phi, false)); },
                         {true, false}, {}, "N_inf");
  }
  return out;
}

double degraded_constant(double c) { return (1.0 - c) * c / (2.0 - c); }

double sampled_accretivity(const CausalOp& s, const ProbeSet& probes, double nu, Index times) {
  const TimeGrid& g = probes.grid();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : probes.probes()) {
    const Signal phi = p.with_nu(nu);
    const Signal sp = s(phi);
    const double total = norm_nu(phi, nu);
    for (Index i = 1; i <= times; ++i) {
      const double t = g.node((g.n - 1) * i / times);
      const double q2 = std::pow(norm_nu(truncate_before(phi, t), nu), 2);
      if (q2 <= 1e-14 * total * total) continue;
      lo = std::min(lo, inner_nu(truncate_before(sp, t), phi, nu).real() / q2);
    }
  }
  return lo;
}

double bessel_i0(double z) {
  const double q = 0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-14 * sum) break;
  }
  return sum;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "loglog_slope: need two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, ErrorCode::InvalidArgument, "loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace evo
