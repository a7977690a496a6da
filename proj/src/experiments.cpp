// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evocalc/causal_op.hpp"
#include "evocalc/evo_solvers.hpp"
#include "evocalc/homogenization.hpp"
#include "evocalc/time_calculus.hpp"
#include "experiment_util.hpp"

namespace fs = std::filesystem;

namespace evo {

using detail::num;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& where) {
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::Config, where + ": expected a number, got '" + v + "'");
  }
  require(used == v.size() && std::isfinite(x), ErrorCode::Config, where + ": expected a number, got '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    require(!item.empty(), ErrorCode::Config, where + ": empty list entry");
    out.push_back(to_double(item, where));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"spectrum", "ode-block", "picard", "transfer", "causality-suite",
                                                 "timprod",  "dbf",       "memory-kernel", "eddy", "heat",
                                                 "wave",     "funid",     "suite-all"};
  return names;
}

ExperimentDefaults experiment_defaults(const std::string& name) {
  if (name == "spectrum") return {0.0, 30.0, 0.01, 1.0, {0.5, 1.0, 2.0}};
  if (name == "ode-block") return {0.0, 1.2, 1e-3, 20.0, {20.0, 40.0}};
  // picard: scales are steps per unit time, nu is fixed to 2 lip by the solver.
  if (name == "picard") return {0.0, 6.0, 1e-3, 2.0, {250.0, 500.0, 1000.0}};
  if (name == "transfer") return {0.0, 20.0, 1e-3, 0.5, {250.0, 500.0, 1000.0}};
  if (name == "causality-suite") return {0.0, 4.0, 0.01, 1.0, {1.0}};
  if (name == "timprod") return {0.0, 8.0, 1.0 / 2048.0, 1.0, {8.0, 16.0, 32.0, 64.0}};
  if (name == "dbf") return {0.0, 16.0, 1.0 / 2048.0, 0.25, {8.0, 16.0, 32.0, 64.0}};
  if (name == "memory-kernel") return {0.0, 4.0, 2e-3, 3.0, {8.0, 16.0, 32.0, 64.0}};
  if (name == "eddy") return {0.0, 10.0, 0.01, 1.0, {4.0, 8.0, 16.0, 32.0}};
  if (name == "heat") return {0.0, 4.0, 0.01, 1.0, {4.0, 16.0, 64.0, 256.0}};
  if (name == "wave") return {0.0, 10.0, 0.01, 1.0, {8.0, 16.0, 32.0, 64.0}};
  if (name == "funid") return {0.0, 4.0, 0.01, 1.0, {1.0, 2.0, 3.0}};
  if (name == "suite-all") return {0.0, 1.0, 0.5, 1.0, {1.0}};
  fail(ErrorCode::Config, "unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::Config, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    require(!key.empty(), ErrorCode::Config, where + ": empty key");
    require(seen.insert(key).second, ErrorCode::Config, where + ": duplicate key '" + key + "'");
    const std::string w = where + " (" + key + ")";
    if (key == "experiment") {
      const auto& names = experiment_names();
      require(std::find(names.begin(), names.end(), val) != names.end(), ErrorCode::Config,
              w + ": unknown experiment '" + val + "'");
      cfg.experiment = val;
    } else if (key == "t0") {
      cfg.t0 = to_double(val, w);
    } else if (key == "dt") {
      cfg.dt = to_double(val, w);
      require(*cfg.dt > 0, ErrorCode::Config, w + ": dt must be positive");
    } else if (key == "t_end") {
      cfg.t_end = to_double(val, w);
    } else if (key == "nu") {
      cfg.nu = to_double(val, w);
      require(*cfg.nu > 0, ErrorCode::Config, w + ": nu must be positive");
    } else if (key == "n") {
      const double v = to_double(val, w);
      require(v >= 2 && std::floor(v) == v, ErrorCode::Config, w + ": n must be an integer >= 2");
      cfg.n = static_cast<Index>(v);
    } else if (key == "scales") {
      require(!val.empty(), ErrorCode::Config, w + ": empty scales list");
      cfg.scales = to_list(val, w);
    } else if (key == "seed") {
      const double v = to_double(val, w);
      require(v >= 0 && std::floor(v) == v && v < 9.007199254740992e15, ErrorCode::Config,
              w + ": seed must be a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "output") {
      require(!val.empty(), ErrorCode::Config, w + ": empty output path");
      cfg.output = val;
    } else if (key == "expect") {
      require(val == "pass" || val == "fail", ErrorCode::Config, w + ": expect is pass or fail");
      cfg.expect_fail = val == "fail";
    } else if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
      cfg.tol[key.substr(4)] = to_double(val, w);
    } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
      cfg.param[key.substr(6)] = val;
    } else {
      fail(ErrorCode::Config, where + ": unknown key '" + key + "'");
    }
  }
  require(!cfg.experiment.empty(), ErrorCode::Config, origin + ": missing 'experiment'");
  if (cfg.t_end && cfg.n) fail(ErrorCode::Config, origin + ": give either n or t_end, not both");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse(ss.str(), path);
  const fs::path parent = fs::path(path).parent_path();
  cfg.base_dir = parent.empty() ? "." : parent.string();
  return cfg;
}

double ExperimentContext::tol(const std::string& key, double fallback) const {
  const auto it = config.tol.find(key);
  return it == config.tol.end() ? fallback : it->second;
}

double ExperimentContext::param(const std::string& key, double fallback) const {
  const auto it = config.param.find(key);
  return it == config.param.end() ? fallback : to_double(it->second, "param." + key);
}

std::string ExperimentContext::param_str(const std::string& key, const std::string& fallback) const {
  const auto it = config.param.find(key);
  return it == config.param.end() ? fallback : it->second;
}

std::vector<double> ExperimentContext::param_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = config.param.find(key);
  if (it == config.param.end()) return fallback;
  auto v = to_list(it->second, "param." + key);
  require(!v.empty(), ErrorCode::Config, "param." + key + ": empty list");
  return v;
}

void ExperimentContext::note(const std::string& msg) const {
  if (log) *log << "[" << config.experiment << "] " << msg << '\n';
}

ExperimentContext make_context(const ExperimentConfig& cfg, std::ostream* log) {
  const ExperimentDefaults d = experiment_defaults(cfg.experiment);
  ExperimentContext ctx;
  const double t0 = cfg.t0.value_or(d.t0);
  const double dt = cfg.dt.value_or(d.dt);
  const double nu = cfg.nu.value_or(d.nu);
  if (cfg.n) {
    ctx.grid = TimeGrid(t0, dt, *cfg.n, nu);
  } else {
    const double t_end = cfg.t_end.value_or(d.t_end);
    require(t_end > t0, ErrorCode::Config, "t_end must exceed t0");
    ctx.grid = TimeGrid::window(t0, t_end, dt, nu);
  }
  ctx.scales = cfg.scales.value_or(d.scales);
  require(!ctx.scales.empty(), ErrorCode::Config, "empty scales list");
  require(std::is_sorted(ctx.scales.begin(), ctx.scales.end()), ErrorCode::Config, "scales must be increasing");
  ctx.seed = cfg.seed;
  ctx.config = cfg;
  ctx.log = log;
  return ctx;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CMatrix random_matrix(Rng& rng, Index r, Index c) {
  CMatrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = rng.complex_normal();
  return m;
}

double spectral(const CMatrix& m) { return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<CMatrix>(m).singularValues()[0]; }

CMatrix with_norm(const CMatrix& m, double target) { return m * (target / spectral(m)); }

// Identity plus a random skew part plus a small positive part: Hermitian part >= 1.
CMatrix accretive_block(Rng& rng, Index d, double skew, double psd) {
  const CMatrix z = random_matrix(rng, d, d);
  const CMatrix s = z - z.adjoint();
  const CMatrix p = z * z.adjoint();
  return CMatrix::Identity(d, d) + with_norm(s, skew) + with_norm(p, psd);
}

}  // namespace

ConvergenceReport spectrum_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("spectrum", ctx.seed);
  const double fft_dt = ctx.param("fft_dt", 2.5e-4);
  const Index kmax = static_cast<Index>(ctx.param("kmax", 2000));
  for (double nu : ctx.scales) {
    require(nu > 0, ErrorCode::Config, "spectrum: scales are weights nu > 0");
    const TimeGrid g = ctx.grid.with_nu(nu);
    const SpectrumReport sr = spectrum_of_antiderivative(g, kmax);

    const CMatrix h = to_dense(antiderivative_op(1), g);
    const NormEstimate ne = dense_weighted_norm(h, g, 1, 1, nu);

    const TimeGrid gf = TimeGrid::window(g.t0, g.t_end(), fft_dt, nu);
    const ProbeSet sp = ProbeSet::smooth(gf, 1, ctx.seed, 6, g.t0 + 10.0, g.t0 + 2.0);
    const MultiplierFunction hm = MultiplierFunction::scalar([](Complex z) { return z; }, 1.0 / nu);
    double fft_err = 0.0;
    for (const auto& phi : sp.probes()) {
      const Signal a = antiderivative(phi);
      const Signal b = apply_multiplier(hm, phi);
      fft_err = std::max(fft_err, norm_nu(a - b) / norm_nu(b));
    }

    const ProbeSet ap = ProbeSet::smooth(g, 1, ctx.seed + 1, 20, g.t_end() - 1.0, g.t0 + 1.0);
    double acc = 0.0;
    for (const auto& phi : ap.probes()) {
      const double lhs = inner_nu(derivative(phi), phi).real();
      acc = std::max(acc, std::abs(lhs / (nu * std::pow(norm_nu(phi), 2)) - 1.0));
    }

    const double norm_tol = 1.0 / nu + ctx.tol("norm_excess", 0.02);
    const bool ok = sr.max_circle_deviation <= ctx.tol("circle", 1e-12) && fft_err <= ctx.tol("fft", 1e-3) &&
                    ne.value <= norm_tol && acc <= ctx.tol("accretivity", 0.02);
    rep.add_row({nu, sr.max_circle_deviation, fft_err, ne.value, sr.radius, ok ? "pass" : "fail", ""});
    const std::string tag = " nu=" + num(nu);
    rep.check("circle deviation" + tag, sr.max_circle_deviation, "<=", ctx.tol("circle", 1e-12));
    rep.check("discrete circle deviation" + tag, sr.max_discrete_deviation, "<=", ctx.tol("circle", 1e-12));
    rep.check("cumsum vs FFT relative" + tag, fft_err, "<=", ctx.tol("fft", 1e-3));
    rep.check("antiderivative norm" + tag, ne.value, "<=", norm_tol);
    rep.check("accretivity identity relative" + tag, acc, "<=", ctx.tol("accretivity", 0.02));
    ctx.note("nu=" + num(nu) + " norm=" + num(ne.value) + " fft=" + num(fft_err) + " acc=" + num(acc));
  }
  return rep;
}

ConvergenceReport ode_block_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("ode-block", ctx.seed);
  const Index m0 = static_cast<Index>(ctx.param("m0", 2));
  const Index m1 = static_cast<Index>(ctx.param("m1", 1));
  const Index dim = m0 + m1;
  const double c = 1.0;
  Rng rng(ctx.seed);
  const CMatrix M = accretive_block(rng, m0, 0.3, 0.2);
  const CMatrix N11 = accretive_block(rng, m1, 0.3, 0.2);
  const CMatrix N00 = with_norm(random_matrix(rng, m0, m0), ctx.param("n00", 1.0));
  const CMatrix N01 = with_norm(random_matrix(rng, m0, m1), ctx.param("n01", 1.0));
  const CMatrix N10 = with_norm(random_matrix(rng, m1, m0), ctx.param("n10", 1.0));
  const OdeBlockSystem sys = OdeBlockSystem::from_blocks(M, N00, N01, N10, N11, c);
  const CMatrix Minv = M.inverse();
  const CMatrix N11inv = N11.inverse();
  const CMatrix L10 = -N11inv * N10 * Minv;
  const double route_tol = ctx.tol("route", 1e-6);
  const double slack = ctx.tol("bound_slack", 0.05);

  for (double nu : ctx.scales) {
    const TimeGrid g = ctx.grid.with_nu(nu);
    const ProbeSet probes = ProbeSet::standard(g, dim, ctx.seed, 3, g.t_end() * 0.8);
    double disc = 0.0;
    OdeSolveInfo info;
    for (const auto& f : probes.probes()) {
      solve_ode_block(sys, f, nu, 1.0, &info);
      disc = std::max(disc, info.route_discrepancy);
    }
    // B^{-1} diag(D, 1) minus its leading part, materialized and measured by Lanczos.
    const CausalOp x(dim, dim, [&](const Signal& f) {
      Signal in = f;
      Signal top(f.grid(), CMatrix(f.values().topRows(m0)));
      in.values().topRows(m0) = derivative(top).values();
      Signal u = ode_time_step(sys, in);
      u.values().topRows(m0) -= Minv * f.values().topRows(m0);
      u.values().bottomRows(m1) -= L10 * f.values().topRows(m0) + N11inv * f.values().bottomRows(m1);
      return u;
    });
    const NormEstimate lhs = dense_weighted_norm(to_dense(x, g), g, dim, dim, nu);
    const double bound = ode_residual_bound(info.norms, c, info.nu_eff);
    const bool ok = disc <= route_tol && lhs.value <= (1.0 + slack) * bound;
    rep.add_row({nu, disc, info.theta, lhs.value, bound, ok ? "pass" : "fail", ""});
    const std::string tag = " nu=" + num(nu);
    rep.check("route discrepancy" + tag, disc, "<=", route_tol);
    rep.check("residual estimate lhs / bound" + tag, lhs.value / bound, "<=", 1.0 + slack);
    ctx.note("nu=" + num(nu) + " theta=" + num(info.theta) + " lhs=" + num(lhs.value) + " bound=" + num(bound) +
             " disc=" + num(disc) + " lanczos_converged=" + std::to_string(lhs.converged));
  }
  return rep;
}

namespace {

// Classical RK4 for u' = sin(u) + f(t), u(t0) = 0, sampled at the grid nodes.
Eigen::VectorXd rk4_reference(const TimeGrid& g, const std::function<double(double)>& f, int sub) {
  Eigen::VectorXd out(g.n);
  double u = 0.0, t = g.t0;
  const double h = g.dt / sub;
  auto rhs = [&f](double tt, double uu) { return std::sin(uu) + f(tt); };
  out[0] = 0.0;
  for (Index k = 1; k < g.n; ++k) {
    for (int s = 0; s < sub; ++s) {
      const double k1 = rhs(t, u);
      const double k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
      const double k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
      const double k4 = rhs(t + h, u + h * k3);
      u += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    out[k] = u;
  }
  return out;
}

}  // namespace

ConvergenceReport picard_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("picard", ctx.seed);
  const double lip = 1.0;
  const double amp = ctx.param("amplitude", 2.0), tc = ctx.param("center", 1.5), w = ctx.param("width", 0.4);
  // The pulse vanishes to rounding at t0, matching u(t0) = 0.
  const auto pulse = [=](double t) { return amp * std::exp(-0.5 * std::pow((t - tc) / w, 2)); };
  const auto F = [](const CVector& u) { return CVector(u.array().sin()); };
  std::vector<double> errs, scales;
  for (double s : ctx.scales) {
    require(s > 0, ErrorCode::Config, "picard: scales are steps per unit time");
    const TimeGrid g = TimeGrid::window(ctx.grid.t0, ctx.grid.t_end(), 1.0 / s, 2.0 * lip);
    const Signal f = Signal::scalar(g, [&](double t) { return Complex(pulse(t)); });
    PicardInfo info;
    const Signal u = picard_solve(F, lip, f, ctx.tol("picard", 1e-12), &info);
    const Eigen::VectorXd ref = rk4_reference(g, pulse, 8);
    const Signal r = Signal::scalar(g, [&](double t) { return Complex(ref[g.first_at_or_after(t - 0.5 * g.dt)]); });
    const double weighted = norm_nu(u - r) / norm_nu(r);
    const double sup = (u.values().row(0).transpose() - ref.cast<Complex>()).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
    errs.push_back(sup);
    scales.push_back(s);
    ReportRow row{s, weighted, sup, info.kappa, ctx.tol("final", 1e-3), "-", ""};
    rep.add_row(row);
    ctx.note("steps/unit=" + num(s) + " kappa=" + num(info.kappa) + " iterations=" + std::to_string(info.iterations) +
             " weighted=" + num(weighted) + " sup=" + num(sup));
  }
  // Only the finest grid is gated, on the sup-relative error.
  ConvergenceReport gated("picard", ctx.seed);
  for (size_t i = 0; i < rep.rows().size(); ++i) {
    ReportRow r = rep.rows()[i];
    if (i + 1 == rep.rows().size()) r.verdict = verdict_le(errs.back(), ctx.tol("final", 1e-3));
    gated.add_row(r);
  }
  gated.check("sup relative error at finest grid", errs.back(), "<=", ctx.tol("final", 1e-3));
  if (scales.size() >= 2) gated.check("observed order (log-log slope)", loglog_slope(scales, errs), "<=", ctx.tol("slope", -0.8));
  return gated;
}

ConvergenceReport transfer_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("transfer", ctx.seed);
  const std::vector<Complex> zs = {1.0, Complex(1.0, 1.0), 2.0};
  const double tol = ctx.tol("final", 1e-3);
  double e_id = 0, e_h = 0, e_s = 0;
  for (size_t i = 0; i < ctx.scales.size(); ++i) {
    const double s = ctx.scales[i];
    require(s > 0, ErrorCode::Config, "transfer: scales are steps per unit time");
    const TimeGrid g = TimeGrid::window(ctx.grid.t0, ctx.grid.t_end(), 1.0 / s, ctx.grid.nu);
    const auto mi = transfer_function(identity_op(1), zs, g);
    const auto mh = transfer_function(antiderivative_op(1), zs, g);
    const auto ms = transfer_function(shift_op(-1.0, 1), zs, g);
    e_id = e_h = e_s = 0;
    for (size_t j = 0; j < zs.size(); ++j) {
      e_id = std::max(e_id, std::abs(mi[j](0, 0) - 1.0));
      e_h = std::max(e_h, std::abs(mh[j](0, 0) - 1.0 / zs[j]));
      e_s = std::max(e_s, std::abs(ms[j](0, 0) - std::exp(-zs[j])));
    }
    const bool last = i + 1 == ctx.scales.size();
    rep.add_row({s, e_id, e_h, e_s, tol, last ? verdict_le(std::max({e_id, e_h, e_s}), tol) : "-", ""});
    ctx.note("steps/unit=" + num(s) + " identity=" + num(e_id) + " antiderivative=" + num(e_h) + " shift=" + num(e_s));
  }
  rep.check("identity -> 1", e_id, "<=", tol);
  rep.check("antiderivative -> 1/z", e_h, "<=", tol);
  rep.check("shift(-1) -> exp(-z)", e_s, "<=", tol);
  return rep;
}

ConvergenceReport causality_suite_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("causality-suite", ctx.seed);
  const double causal_tol = ctx.tol("causality", 1e-10);
  const Index stride = static_cast<Index>(ctx.param("stride", 1));
  const double lo = ctx.param("support_begin", 0.5), hi = ctx.param("support_end", ctx.grid.t_end() - 0.5);
  Rng rng(ctx.seed);

  // Small random ODE blocks so that theta < 1 already at nu = 1.
  const OdeBlockSystem ode = OdeBlockSystem::from_blocks(
      accretive_block(rng, 2, 0.3, 0.2), with_norm(random_matrix(rng, 2, 2), 0.2), with_norm(random_matrix(rng, 2, 1), 0.3),
      with_norm(random_matrix(rng, 1, 2), 0.3), accretive_block(rng, 1, 0.3, 0.2), 1.0);
  const Index cells = 16;
  const Eigen::VectorXd xc = cell_centers(cells);
  const Coefficient heat_a =
      Coefficient::scalar_space(cells, [xc](Index i) { return Complex(1.0 + 0.5 * std::sin(kTwoPi * xc[i])); });
  Maxwell1D mx;
  mx.cells = cells;
  mx.eps = Coefficient::scalar_time([](double t) { return Complex(1.0 + 0.5 * std::cos(t)); }, cells - 1)
               .with_derivative(Coefficient::scalar_time([](double t) { return Complex(-0.5 * std::sin(t)); }, cells - 1));
  mx.mu = Coefficient::identity(cells);
  mx.sigma = Coefficient::identity(cells - 1, 0.5);
  mx.c = 0.5;
  const Coefficient acc_m = Coefficient::scalar_time([](double t) { return Complex(1.0 + 0.5 * std::sin(t)); });
  const Coefficient neu_m = Coefficient::scalar_time([](double t) { return Complex(0.3 * std::cos(t)); });

  struct Entry {
    std::string name;
    Index dim;
    std::function<CausalOp(double)> build;
  };
  const std::vector<Entry> entries = {
      {"ode-block", 3, [ode](double) { return ode_solution_op(ode, 1e-8); }},
      {"picard", 1,
       [](double) {
         return CausalOp(1, 1, [](const Signal& f) {
           return picard_solve([](const CVector& u) { return CVector(u.array().sin()); }, 1.0, f, 1e-13).with_nu(f.grid().nu);
         });
       }},
      {"heat", 2 * cells - 1, [heat_a, cells](double nu) { return pde_solution_op(heat_system(heat_a, cells, 1.0, std::min(nu, 2.0 / 3.0))); }},
      {"maxwell-1d", cells - 1,
       [mx, cells](double) {
         return CausalOp(cells - 1, 2 * cells - 1,
                         [mx](const Signal& j) { return maxwell_1d_solve(mx, j, j.grid().nu).with_nu(j.grid().nu); });
       }},
      {"invert-accretive", 1,
       [acc_m](double) {
         const CausalOp b = add(derivative_op(1), multiply_op(acc_m));
         return CausalOp(1, 1, [b](const Signal& f) { return invert_accretive(b, 0.5, f); });
       }},
      {"neumann", 1,
       [neu_m](double nu) {
         const double nu_eff = (1.0 - std::exp(-nu * 0.01)) / 0.01;
         NeumannOptions opt;
         opt.theta_bound = 0.3 / nu_eff;
         opt.a_inv_norm = 1.0 / nu_eff;
         opt.tol = 1e-13;
         return neumann_inverse(antiderivative_op(1), multiply_op(neu_m), opt);
       }},
      {"resolvent", 1, [](double) { return resolvent_op(0.5, 1); }},
  };

  const double indep_tol = ctx.tol("nu_independence", 10.0 * ctx.grid.dt);
  for (double nu : ctx.scales) {
    const TimeGrid g = ctx.grid.with_nu(nu);
    for (size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const ProbeSet probes = ProbeSet::standard(g, e.dim, ctx.seed + i, 3, hi, lo);
      const double defect = max_causality_defect(e.build(nu), probes, nu, stride);
      const double indep = nu_independence_defect(e.build, nu, 2.0 * nu, probes);
      ReportRow r{nu, defect, indep, 0.0, causal_tol, verdict_le(defect, causal_tol), e.name};
      if (indep > indep_tol) r.verdict = "fail";
      rep.add_row(r);
      rep.check(e.name + " causality defect nu=" + num(nu), defect, "<=", causal_tol);
      rep.check(e.name + " nu-independence nu=" + num(nu) + " vs " + num(2 * nu), indep, "<=", indep_tol);
      ctx.note(e.name + " causality=" + num(defect) + " nu-independence=" + num(indep));
    }
    // Material-law multiplier: nu enters through the transform, the result must not depend on it.
    const ProbeSet mp = ProbeSet::standard(g, 1, ctx.seed + 99, 3, hi, lo);
    const MultiplierFunction law = MultiplierFunction::scalar([](Complex z) { return z / (1.0 + z); }, 1.0);
    const double mindep = nu_independence_defect([law](double) { return multiplier_op(law, 4); }, nu, 2.0 * nu, mp);
    rep.check("multiplier nu-independence nu=" + num(nu) + " vs " + num(2 * nu), mindep, "<=", indep_tol);
    ctx.note("multiplier nu-independence=" + num(mindep));

    const ProbeSet cp = ProbeSet::standard(g, 1, ctx.seed, 3, hi, lo);
    const double control = max_causality_defect(shift_op(ctx.param("control_shift", 0.25), 1), cp, nu, stride);
    rep.check("anti-causal shift control nu=" + num(nu), control, ">=", ctx.tol("control", 0.1));
    ctx.note("anti-causal control=" + num(control));
  }
  return rep;
}

ConvergenceReport funid_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("funid", ctx.seed);
  const TimeGrid& g = ctx.grid;
  const double nu = g.nu;
  const Index cells = static_cast<Index>(ctx.param("cells", 6));
  const SpatialOperator A = SpatialOperator::grad_div_1d(cells);
  const Index dim = A.dim();
  const double res_tol = ctx.tol("funid", 1e-6);
  const double slack = ctx.tol("cdpden_slack", 0.05);

  // Random accretive (M(t), N(t)) with M = M0 + 0.2 sin(t) M1, M1 Hermitian.
  auto random_system = [&](Rng& rng) {
    const CMatrix m0 = accretive_block(rng, dim, 0.0, 0.3);
    const CMatrix z = random_matrix(rng, dim, dim);
    const CMatrix m1 = with_norm(CMatrix(z + z.adjoint()), 1.0);
    const CMatrix n0 = accretive_block(rng, dim, 0.5, 0.2) - 0.8 * CMatrix::Identity(dim, dim);
    const CMatrix n1 = with_norm(random_matrix(rng, dim, dim), 0.3);
    PdeSystem s;
    s.M = Coefficient::time_profile(dim, [m0, m1](double t) { return CMatrix(m0 + 0.2 * std::sin(t) * m1); })
              .with_derivative(Coefficient::time_profile(dim, [m1](double t) { return CMatrix(0.2 * std::cos(t) * m1); }));
    s.N = Coefficient::time_profile(dim, [n0, n1](double t) { return CMatrix(n0 + std::cos(2.0 * t) * n1); });
    s.A = A;
    s.c = 1.0;
    s.c = pde_positivity(s, g, nu, 1) * (1.0 - 1e-9);
    require(s.c > 0, ErrorCode::PreconditionFailed, "funid: random system is not accretive");
    return s;
  };

  for (double idx : ctx.scales) {
    Rng rng(ctx.seed + static_cast<std::uint64_t>(idx) * 1000003ULL);
    const PdeSystem mn = random_system(rng);
    const PdeSystem op = random_system(rng);
    const ProbeSet probes = ProbeSet::standard(g, dim, ctx.seed + static_cast<std::uint64_t>(idx), 3, g.t_end() - 0.5, 0.2);
    double res = 0.0;
    for (const auto& f : probes.probes()) res = std::max(res, funid_residual(mn, op, f));
    const NormEstimateCheck cd = cdpden_check(mn, op, probes, slack);
    const bool ok = res <= res_tol && cd.holds;
    rep.add_row({idx, res, cd.worst_ratio, cd.lhs, cd.rhs, ok ? "pass" : "fail", ""});
    rep.check("identity residual pair " + num(idx), res, "<=", res_tol);
    rep.check("norm estimate worst lhs/rhs pair " + num(idx), cd.worst_ratio, "<=", 1.0 + slack);
    ctx.note("pair " + num(idx) + " c=" + num(mn.c) + "/" + num(op.c) + " residual=" + num(res) +
             " lhs=" + num(cd.lhs) + " rhs=" + num(cd.rhs));
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

ConvergenceReport suite_experiment(const ExperimentContext& ctx) {
  const fs::path dir = fs::path(ctx.config.base_dir) / ctx.param_str("dir", ".");
  const std::string out = ctx.param_str("out", (dir / "reports").string());
  const SuiteResult s = suite_all(dir.string(), out, ctx.log);
  ConvergenceReport rep("suite-all", ctx.seed);
  for (size_t i = 0; i < s.configs.size(); ++i) {
    const std::string& name = s.configs[i];
    ReportRow r;
    r.scale = static_cast<double>(i + 1);
    r.label = name;
    const auto err = s.errors.find(name);
    bool ok = false;
    if (err == s.errors.end()) {
      for (const auto& run : s.runs)
        if (fs::path(run.csv_path).stem().string() == fs::path(name).stem().string()) ok = run.ok;
    }
    r.pairing_error = ok ? 0.0 : 1.0;
    r.verdict = ok ? "pass" : "fail";
    rep.add_row(r);
  }
  return rep;
}

}  // namespace

ConvergenceReport run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentContext ctx = make_context(cfg, log);
  const std::string& e = cfg.experiment;
  ConvergenceReport rep;
  if (e == "spectrum") rep = spectrum_experiment(ctx);
  else if (e == "ode-block") rep = ode_block_experiment(ctx);
  else if (e == "picard") rep = picard_experiment(ctx);
  else if (e == "transfer") rep = transfer_experiment(ctx);
  else if (e == "causality-suite") rep = causality_suite_experiment(ctx);
  else if (e == "timprod") rep = timprod_experiment(ctx);
  else if (e == "dbf") rep = dbf_experiment(ctx);
  else if (e == "memory-kernel") rep = memory_kernel_experiment(ctx);
  else if (e == "eddy") rep = eddy_current_experiment(ctx);
  else if (e == "heat") rep = heat_experiment(ctx);
  else if (e == "wave") rep = wave_g_convergence_experiment(ctx);
  else if (e == "funid") rep = funid_experiment(ctx);
  else if (e == "suite-all") rep = suite_experiment(ctx);
  else fail(ErrorCode::Config, "unknown experiment '" + e + "'");
  const TimeGrid& g = ctx.grid;
  rep.set_meta("grid", "t0=" + num(g.t0) + " dt=" + num(g.dt) + " n=" + std::to_string(g.n) + " nu=" + num(g.nu));
  for (const auto& [k, v] : cfg.tol) rep.set_meta("tol." + k, num(v));
  for (const auto& [k, v] : cfg.param) rep.set_meta("param." + k, v);
  rep.set_runtime(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return rep;
}

namespace {

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot write '" + p.string() + "'");
  out << text;
  require(out.good(), ErrorCode::Io, "write failed for '" + p.string() + "'");
}

}  // namespace

RunResult run_and_write(const ExperimentConfig& cfg, const std::optional<std::string>& out_base, std::ostream* log) {
  RunResult r;
  r.report = run_experiment(cfg, log);
  r.expect_fail = cfg.expect_fail;
  r.ok = r.report.passed() != cfg.expect_fail;
  const std::string base = out_base ? *out_base : (cfg.output.empty() ? cfg.experiment : cfg.output);
  r.csv_path = base + ".csv";
  r.json_path = base + ".json";
  write_file(r.csv_path, r.report.to_csv());
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(r.report.to_json());
  j["expect"] = cfg.expect_fail ? "fail" : "pass";
  j["status"] = r.ok ? "ok" : "unexpected";
  write_file(r.json_path, j.dump(2) + "\n");
  return r;
}

SuiteResult suite_all(const std::string& dir, const std::optional<std::string>& out_dir, std::ostream* log) {
  require(fs::is_directory(dir), ErrorCode::Io, "suite: '" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".conf") files.push_back(e.path());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  const fs::path out = out_dir ? fs::path(*out_dir) : fs::path(dir) / "reports";

  SuiteResult s;
  s.ok = true;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    s.configs.push_back(name);
    nlohmann::ordered_json entry;
    entry["config"] = name;
    try {
      const ExperimentConfig cfg = ExperimentConfig::load(f.string());
      if (cfg.experiment == "suite-all") {
        s.errors[name] = "nested suite-all configs are not run by the suite";
        entry["error"] = s.errors[name];
        s.ok = false;
        runs.push_back(entry);
        continue;
      }
      if (log) *log << "suite: running " << name << '\n';
      RunResult r = run_and_write(cfg, (out / f.stem()).string(), log);
      entry["experiment"] = cfg.experiment;
      entry["seed"] = cfg.seed;
      entry["verdict"] = r.report.passed() ? "pass" : "fail";
      entry["expect"] = cfg.expect_fail ? "fail" : "pass";
      entry["ok"] = r.ok;
      entry["runtime_seconds"] = r.report.runtime_seconds();
      entry["csv"] = r.csv_path;
      entry["json"] = r.json_path;
      if (!r.ok) entry["failures"] = r.report.failures();
      s.ok = s.ok && r.ok;
      s.runs.push_back(std::move(r));
    } catch (const std::exception& ex) {
      s.errors[name] = ex.what();
      entry["error"] = ex.what();
      s.ok = false;
    }
    runs.push_back(entry);
  }
  if (files.empty()) s.ok = false;
  nlohmann::ordered_json j;
  j["suite"] = fs::path(dir).string();
  j["verdict"] = s.ok ? "pass" : "fail";
  j["configs"] = static_cast<int>(files.size());
  j["runs"] = runs;
  s.json = j.dump(2);
  s.json_path = (out / "suite.json").string();
  write_file(s.json_path, s.json + "\n");
  return s;
}

}  // namespace evo
