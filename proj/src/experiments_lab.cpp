// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

// Homogenization and continuous-dependence experiments.

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "evocalc/evo_solvers.hpp"
#include "evocalc/experiments.hpp"
#include "evocalc/homogenization.hpp"
#include "experiment_util.hpp"

namespace evo {

using detail::num;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signal on a space-time grid: time factor times a cell/node pattern.
Signal separable(const TimeGrid& g, const std::function<double(double)>& time, const CVector& space) {
  Signal s(g, space.size());
  for (Index k = 0; k < g.n; ++k) {
    const double a = time(g.node(k));
    if (a != 0.0) s.values().col(k) = a * space;
  }
  return s;
}

CVector interval_pattern(const Eigen::VectorXd& x, double a, double b, Index offset, Index total) {
  CVector v = CVector::Zero(total);
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] >= a && x[i] < b) v[offset + i] = 1.0;
  return v;
}

std::function<double(double)> time_indicator(double a, double b) {
  return [a, b](double t) { return (t >= a && t < b) ? 1.0 : 0.0; };
}

CausalOp solver_op(Index dim, std::function<Signal(const Signal&)> f, std::string name) {
  return CausalOp(dim, dim, std::move(f), {true, false}, {}, std::move(name));
}

std::vector<double> integer_scales(const ExperimentContext& ctx) {
  for (double s : ctx.scales)
    require(s >= 1 && std::floor(s) == s, ErrorCode::Config, "scales must be positive integers here");
  return ctx.scales;
}

}  // namespace

ConvergenceReport timprod_experiment(const ExperimentContext& ctx) {
  const std::string family = ctx.param_str("family", "product");
  require(family == "product" || family == "sine", ErrorCode::Config, "timprod: param.family is product or sine");
  ConvergenceReport rep("timprod", ctx.seed);
  rep.set_meta("family", family);
  const TimeGrid& g = ctx.grid;
  const double nu = g.nu;
  const std::vector<double> scales = integer_scales(ctx);
  const double support = ctx.param("support_end", std::min(4.0, g.t_end()));
  const ProbeSet probes = ProbeSet::standard(g, 1, ctx.seed, static_cast<Index>(ctx.param("probes", 9)), support);

  std::vector<TopologyErrors> errs;
  std::vector<double> weak;
  if (family == "product") {
    const std::vector<Profile> a = {[](double y) { return Complex(1.0 + 0.5 * std::sin(kTwoPi * y)); },
                                    [](double y) { return Complex(1.0 + 0.5 * std::cos(kTwoPi * y)); }};
    Complex prod = 1.0;
    for (const auto& f : a) prod *= OscillatoryFamily{f, {}}.mean();
    rep.set_meta("product_of_means", num(prod.real()));
    const CausalOp lim = product_limit(a);
    for (double n : scales) {
      errs.push_back(topology_errors(product_operator(a, n), lim, probes, nu));
      weak.push_back(errs.back().weak);
      ctx.note("timprod n=" + num(n) + " weak=" + num(errs.back().weak));
    }
    detail::add_decay_rows(rep, scales, errs, weak, ctx.tol("final", 0.02), ctx.tol("slope", -0.5), "pairing error");
  } else {
    const Profile s = [](double y) { return Complex(std::sin(kTwoPi * y)); };
    const CausalOp zero = zero_op(1, 1);
    for (double n : scales) {
      errs.push_back(topology_errors(oscillatory_multiplication(s, n), zero, probes, nu));
      weak.push_back(errs.back().weak);
      ctx.note("sine n=" + num(n) + " weak=" + num(errs.back().weak) + " strong=" + num(errs.back().strong));
    }
    detail::add_decay_rows(rep, scales, errs, weak, ctx.tol("final", 0.02), ctx.tol("slope", -0.5), "pairing error");
    const double target = 1.0 / std::sqrt(2.0);
    rep.check("strong error relative distance to 1/sqrt(2) at final scale",
              std::abs(errs.back().strong - target) / target, "<=", ctx.tol("strong_band", 0.1));
  }
  detail::check_ordering(rep, errs);
  return rep;
}

ConvergenceReport dbf_experiment(const ExperimentContext& ctx) {
  const std::string oracle = ctx.param_str("oracle", "harmonic");
  require(oracle == "harmonic" || oracle == "arithmetic", ErrorCode::Config,
          "dbf: param.oracle is harmonic or arithmetic");
  ConvergenceReport rep("dbf", ctx.seed);
  rep.set_meta("oracle", oracle);
  const TimeGrid& g = ctx.grid;
  const double nu = g.nu;
  const std::vector<double> scales = integer_scales(ctx);
  const double amp = ctx.param("mu_amplitude", 0.0);
  const OscillatoryFamily eps{[](double y) { return Complex(2.0 + std::sin(kTwoPi * y)); }, scales};
  const OscillatoryFamily mu{[amp](double y) { return Complex(1.0 + amp * std::cos(kTwoPi * y)); }, scales};
  const double skew = ctx.param("skew", 0.25);
  CMatrix A(2, 2);
  A << 0.0, -skew, skew, 0.0;
  const double c = std::min(eps.min_real(), mu.min_real());
  require(c > 0, ErrorCode::PreconditionFailed, "dbf: eps and mu must have positive real part");
  const Complex e_lim = oracle == "harmonic" ? eps.harmonic_mean() : eps.mean();
  const Complex m_lim = oracle == "harmonic" ? mu.harmonic_mean() : mu.mean();
  rep.set_meta("eps_limit", num(e_lim.real()));
  rep.set_meta("mu_limit", num(m_lim.real()));

  auto system = [&](std::function<CMatrix(double)> m) {
    OdeBlockSystem s;
    s.M = Coefficient::time_profile(2, std::move(m));
    s.N = Coefficient::constant(A);
    s.m0 = 2;
    s.m1 = 0;
    s.c = c;
    return s;
  };
  CMatrix Mlim = CMatrix::Zero(2, 2);
  Mlim(0, 0) = e_lim;
  Mlim(1, 1) = m_lim;
  const OdeBlockSystem lim_sys = system([Mlim](double) { return Mlim; });
  const CausalOp lim = solver_op(2, [lim_sys](const Signal& f) { return ode_time_step(lim_sys, f); }, "dbf limit");

  // Indicators along each component: the pairing of long aligned intervals separates the oracles.
  ProbeSet probes(g, 2, ctx.seed);
  const double T = std::min(g.t_end(), ctx.param("support_end", 12.0));
  Rng rng(ctx.seed);
  for (Index comp = 0; comp < 2; ++comp) {
    CVector e = CVector::Zero(2);
    e[comp] = 1.0;
    probes.add(Signal::indicator(g, 0.0, T, 2, e));
    for (int i = 0; i < 2; ++i) {
      const double a = rng.uniform(0.0, 0.3 * T);
      probes.add(Signal::indicator(g, a, a + rng.uniform(0.3, 0.7) * T, 2, e));
    }
  }

  std::vector<TopologyErrors> errs;
  std::vector<double> weak;
  for (double n : scales) {
    const OdeBlockSystem sys = system([&eps, &mu, n](double t) {
      CMatrix m = CMatrix::Zero(2, 2);
      m(0, 0) = eps.base(n * t);
      m(1, 1) = mu.base(n * t);
      return m;
    });
    const CausalOp sn = solver_op(2, [sys](const Signal& f) { return ode_time_step(sys, f); }, "dbf");
    errs.push_back(detail::pairing_errors(sn, lim, probes, probes, nu));
    weak.push_back(errs.back().weak);
    ctx.note("dbf n=" + num(n) + " weak=" + num(errs.back().weak));
  }
  detail::add_decay_rows(rep, scales, errs, weak, ctx.tol("final", 0.02), ctx.tol("slope", -0.5), "pairing error");
  detail::check_ordering(rep, errs);
  return rep;
}

Signal causal_convolution(const Eigen::VectorXd& kernel, const Signal& f) {
  const TimeGrid& g = f.grid();
  require(kernel.size() >= g.n, ErrorCode::InvalidArgument, "causal_convolution: kernel shorter than the grid");
  Index len = 1;
  while (len < 2 * g.n) len *= 2;
  Eigen::FFT<double> fft;
  std::vector<Complex> kin(static_cast<size_t>(len), 0.0), kout, in(static_cast<size_t>(len)), out, back;
  for (Index k = 0; k < g.n; ++k) kin[static_cast<size_t>(k)] = kernel[k];
  fft.fwd(kout, kin);
  Signal y(g, f.dim());
  for (Index d = 0; d < f.dim(); ++d) {
    if (f.values().row(d).cwiseAbs().maxCoeff() == 0.0) continue;
    std::fill(in.begin(), in.end(), Complex(0.0));
    for (Index k = 0; k < g.n; ++k) in[static_cast<size_t>(k)] = f.values()(d, k);
    fft.fwd(out, in);
    for (Index j = 0; j < len; ++j) out[static_cast<size_t>(j)] *= kout[static_cast<size_t>(j)];
    fft.inv(back, out);
    for (Index k = 0; k < g.n; ++k) y.values()(d, k) = g.dt * back[static_cast<size_t>(k)];
  }
  return y;
}

ConvergenceReport memory_kernel_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("memory-kernel", ctx.seed);
  const TimeGrid& g = ctx.grid;
  const double nu = g.nu;
  require(nu > 1.0, ErrorCode::Config, "memory-kernel: nu must exceed 1 (I0 grows like e^t)");
  const std::vector<double> scales = integer_scales(ctx);
  const Index per_period = static_cast<Index>(ctx.param("cells_per_period", 16));

  // Mean over one period of exp(-sin): the kernel identity checked against the series.
  const Index q = 4096;
  double mean = 0.0;
  for (Index i = 0; i < q; ++i) mean += std::exp(-std::sin(kTwoPi * static_cast<double>(i) / q));
  mean /= q;
  rep.check("|I0(1) - mean exp(-sin)|", std::abs(bessel_i0(1.0) - mean), "<=", 1e-12);

  Eigen::VectorXd kernel(g.n);
  for (Index k = 0; k < g.n; ++k) kernel[k] = bessel_i0(static_cast<double>(k) * g.dt);

  const double T = g.t_end();
  const std::vector<std::pair<double, double>> tint = {{0.1 * T, 0.45 * T}, {0.05 * T, 0.2 * T}};
  const std::vector<std::pair<double, double>> xint = {{0.13, 0.58}, {0.31, 0.97}};
  std::vector<TopologyErrors> errs;
  std::vector<double> weak;
  for (double n : scales) {
    const Index cells = per_period * static_cast<Index>(n);
    const Eigen::VectorXd x = cell_centers(cells);
    PdeSystem sys;
    sys.M = Coefficient::identity(cells);
    sys.N = Coefficient::scalar_space(cells, [x, n](Index i) { return Complex(std::sin(kTwoPi * n * x[i])); });
    sys.A = SpatialOperator::zero(cells);
    sys.c = nu - 1.0;
    PdeOptions opt;
    opt.check_causality = false;
    const CausalOp sn(cells, cells, [sys, opt](const Signal& f) { return solve_evo_pde(sys, f, f.grid().nu, opt); },
                      {true, true}, {}, "memory");
    ProbeSet probes(g, cells, ctx.seed);
    for (const auto& [ta, tb] : tint)
      for (const auto& [xa, xb] : xint) probes.add(separable(g, time_indicator(ta, tb), interval_pattern(x, xa, xb, 0, cells)));
    const CausalOp lim_n(cells, cells, [kernel](const Signal& f) { return causal_convolution(kernel, f); },
                         {true, true}, {}, "I0 kernel");
    errs.push_back(detail::pairing_errors(sn, lim_n, probes, probes, nu));
    weak.push_back(errs.back().weak);
    ctx.note("memory-kernel 1/eps=" + num(n) + " cells=" + std::to_string(cells) + " weak=" + num(errs.back().weak));
  }
  detail::add_decay_rows(rep, scales, errs, weak, ctx.tol("final", 0.02), ctx.tol("slope", -0.5), "pairing error");
  detail::check_ordering(rep, errs);
  return rep;
}

ConvergenceReport eddy_current_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("eddy", ctx.seed);
  const std::vector<double> scales = ctx.scales;
  const std::vector<double> etas = ctx.param_list("etas", {1.0, 2.0});
  const Index cells = static_cast<Index>(ctx.param("cells", 16));
  const double slack = ctx.tol("slack", 0.1);
  const Index p = cells - 1, dim = p + cells;
  const double c = 1.0;

  auto model = [&](double n) {
    Maxwell1D m;
    m.cells = cells;
    m.c = c;
    m.mu = Coefficient::identity(cells);
    m.sigma = Coefficient::identity(p);
    if (n == 0.0) {
      m.eps = Coefficient::zero(p);
    } else {
      m.eps = Coefficient::scalar_time([n](double t) { return Complex((1.0 + 0.5 * std::cos(t)) / n); }, p)
                  .with_derivative(Coefficient::scalar_time([n](double t) { return Complex(-0.5 * std::sin(t) / n); }, p));
    }
    return m;
  };
  const PdeSystem s0 = maxwell_system(model(0.0));
  PdeOptions opt;
  opt.check_causality = false;

  for (double eta : etas) {
    const TimeGrid g = ctx.grid.with_nu(eta);
    const ProbeSet probes = ProbeSet::standard(g, dim, ctx.seed, static_cast<Index>(ctx.param("probes", 6)),
                                               std::min(g.t_end(), ctx.param("support_end", 3.0)));
    const CausalOp sol0 = solver_op(dim, [s0, opt](const Signal& f) { return solve_evo_pde(s0, f, f.grid().nu, opt); },
                                    "eddy current");
    std::vector<double> lhs, ns;
    std::vector<TopologyErrors> errs;
    for (double n : scales) {
      require(n > 0, ErrorCode::Config, "eddy: scales must be positive");
      const Maxwell1D m = model(n);
      require(maxwell_premise(m, g, {eta}), ErrorCode::PreconditionFailed, "eddy: eta eps + eps'/2 >= 0 fails");
      const PdeSystem sn = maxwell_system(m);
      // (S(eps) S(0)^{-1} - 1) H S(0)
      const CausalOp x = solver_op(
          dim,
          [s0, sn, opt, sol0](const Signal& f) {
            const Signal h = antiderivative(sol0(f));
            return solve_evo_pde(sn, apply_evo_pde(s0, h), f.grid().nu, opt) - h;
          },
          "eddy defect");
      const TopologyErrors e = detail::pairing_errors(x, zero_op(dim, dim), probes, probes, eta);
      const double rhs = (m.eps.sup_norm(g) + m.eps.derivative()->sup_norm(g) / eta) / (c * c);
      ReportRow r;
      r.scale = n;
      r.pairing_error = e.weak;
      r.strong_error = e.strong;
      r.norm_error = e.norm;
      r.bound_rhs = rhs;
      r.verdict = verdict_le(e.norm, (1.0 + slack) * rhs);
      r.label = "eta=" + num(eta);
      rep.add_row(r);
      errs.push_back(e);
      lhs.push_back(e.norm);
      ns.push_back(n);
      ctx.note("eddy eta=" + num(eta) + " n=" + num(n) + " lhs=" + num(e.norm) + " rhs=" + num(rhs));
    }
    bool positive = true;
    for (double v : lhs) positive = positive && v > 0;
    if (ns.size() >= 2)
      rep.check("eta=" + num(eta) + " log-log slope", positive ? loglog_slope(ns, lhs) : -INFINITY, "<=",
                ctx.tol("slope", -0.9));
    detail::check_ordering(rep, errs);
  }
  return rep;
}

ConvergenceReport heat_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("heat", ctx.seed);
  const TimeGrid& g = ctx.grid;
  const double nu = g.nu;
  const std::vector<double> scales = ctx.scales;
  const Index cells = static_cast<Index>(ctx.param("cells", 64));
  const Index dim = 2 * cells - 1;
  const Eigen::VectorXd x = cell_centers(cells);
  const std::string family = ctx.param_str("family", "power");
  require(family == "power" || family == "layer", ErrorCode::Config, "heat: param.family is power or layer");

  // a_k -> b = 1 pointwise on (0, 1), bounded by 2: power 1 + x^k, layer 1 + exp(-k x).
  auto profile = [&](double k) {
    return Coefficient::scalar_space(cells, [x, k, family](Index i) {
      if (k == 0.0) return Complex(1.0);
      return Complex(family == "power" ? 1.0 + std::pow(x[i], k) : 1.0 + std::exp(-k * x[i]));
    });
  };
  const double c = std::min(nu, 0.5);
  PdeOptions opt;
  opt.check_causality = false;
  const PdeSystem lim_sys = heat_system(profile(0.0), cells, 1.0, c);
  const CausalOp lim = solver_op(dim, [lim_sys, opt](const Signal& f) { return solve_evo_pde(lim_sys, f, f.grid().nu, opt); },
                                 "heat limit");
  const ProbeSet probes = ProbeSet::standard(g, dim, ctx.seed, static_cast<Index>(ctx.param("probes", 6)),
                                             std::min(g.t_end(), ctx.param("support_end", 3.0)));
  std::vector<TopologyErrors> errs;
  std::vector<double> strong;
  for (double k : scales) {
    require(k > 0, ErrorCode::Config, "heat: scales must be positive");
    const PdeSystem sys = heat_system(profile(k), cells, 1.0, c);
    const CausalOp sk = solver_op(dim, [sys, opt](const Signal& f) { return solve_evo_pde(sys, f, f.grid().nu, opt); }, "heat");
    errs.push_back(detail::pairing_errors(sk, lim, probes, probes, nu));
    strong.push_back(errs.back().strong);
    ctx.note("heat k=" + num(k) + " strong=" + num(errs.back().strong));
  }
  detail::add_decay_rows(rep, scales, errs, strong, ctx.tol("final", 0.02), std::nullopt, "strong error");
  detail::check_ordering(rep, errs);

  // Re a >= c implies Re a^{-1} >= c / |a|^2, on seeded 3x3 samples.
  Rng rng(ctx.seed + 1);
  double margin = INFINITY;
  for (int s = 0; s < 200; ++s) {
    CMatrix z(3, 3);
    for (Index i = 0; i < 9; ++i) z(i) = rng.complex_normal();
    CMatrix a = z * z.adjoint() * 0.3 + (z - z.adjoint()) + CMatrix::Identity(3, 3) * rng.uniform(0.1, 2.0);
    const CMatrix herm = 0.5 * (a + a.adjoint());
    const double ca = Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues()[0];
    const CMatrix ai = a.inverse();
    const double cai =
        Eigen::SelfAdjointEigenSolver<CMatrix>(CMatrix(0.5 * (ai + ai.adjoint())), Eigen::EigenvaluesOnly).eigenvalues()[0];
    const double an = Eigen::JacobiSVD<CMatrix>(a).singularValues()[0];
    margin = std::min(margin, cai - ca / (an * an));
  }
  rep.check("min(Re a^-1 - c/|a|^2) on sampled matrices", margin, ">=", -1e-10);
  return rep;
}

ConvergenceReport wave_g_convergence_experiment(const ExperimentContext& ctx) {
  ConvergenceReport rep("wave", ctx.seed);
  const TimeGrid& g = ctx.grid;
  const double nu = g.nu;
  const std::vector<double> scales = integer_scales(ctx);
  const Index per_period = static_cast<Index>(ctx.param("cells_per_period", 16));
  const OscillatoryFamily fam{[](double y) { return Complex(2.0 + std::sin(kTwoPi * y)); }, scales};
  const double b = fam.harmonic_mean().real();
  rep.set_meta("harmonic_mean", num(b));
  const double T = g.t_end();

  std::vector<TopologyErrors> errs;
  std::vector<double> weak;
  double ladder_last = 0.0, factor_gap = 0.0, proj_defect = 0.0;
  std::vector<double> ladder;
  for (double n : scales) {
    const Index cells = per_period * static_cast<Index>(n);
    const Index p = cells - 1, dim = p + cells;
    const Eigen::VectorXd xc = cell_centers(cells);
    const Eigen::VectorXd xn = interior_nodes(cells);
    const Coefficient an = Coefficient::scalar_space(cells, [&fam, xc, n](Index i) { return fam.base(n * xc[i]); });
    const Coefficient bn = Coefficient::scalar_space(cells, [b](Index) { return Complex(b); });
    proj_defect = std::max(proj_defect, SpatialOperator::grad_div_1d_projected(cells).projection_defect());

    // Elliptic premise: -(a_eps u')' = f against the harmonic-mean solution, gradients paired with cell indicators.
    CVector f(p);
    for (Index i = 0; i < p; ++i) f[i] = 1.0 + std::cos(3.0 * xn[i]);
    const CVector ue = elliptic_solve(an, f, cells);
    const CVector ub = elliptic_solve(bn, f, cells);
    const CVector ud = elliptic_solve_direct(an, f, cells);
    factor_gap = std::max(factor_gap, (ue - ud).norm() / ud.norm());
    const SparseC G = SpatialOperator::grad_div_1d(cells).grad0();
    const CVector dg = G * (ue - ub);
    const double gb = (G * ub).norm();
    double lad = 0.0;
    for (const auto& [xa, xb] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.17, 0.61}, {0.4, 0.93}}) {
      const CVector psi = interval_pattern(xc, xa, xb, 0, cells);
      lad = std::max(lad, std::abs(psi.dot(dg)) / (psi.norm() * gb));
    }
    ladder.push_back(lad);
    ladder_last = lad;

    const CausalOp sn = solver_op(dim, [an, cells](const Signal& d) { return wave_1d_solve(an, cells, 1.0, d); }, "wave");
    const CausalOp sb = solver_op(dim, [bn, cells](const Signal& d) { return wave_1d_solve(bn, cells, 1.0, d); }, "wave limit");
    ProbeSet probes(g, dim, ctx.seed);
    ProbeSet tests(g, dim, ctx.seed);
    const std::vector<std::pair<double, double>> tint = {{0.05 * T, 0.3 * T}, {0.1 * T, 0.6 * T}};
    const std::vector<std::pair<double, double>> xint = {{0.13, 0.58}, {0.31, 0.97}};
    for (const auto& [ta, tb] : tint)
      for (const auto& [xa, xb] : xint) {
        probes.add(separable(g, time_indicator(ta, tb), interval_pattern(xn, xa, xb, 0, dim)));
        tests.add(separable(g, time_indicator(ta, tb), interval_pattern(xn, xa, xb, 0, dim)));
        tests.add(separable(g, time_indicator(ta, tb), interval_pattern(xc, xa, xb, p, dim)));
      }
    errs.push_back(detail::pairing_errors(sn, sb, probes, tests, nu));
    weak.push_back(errs.back().weak);
    ctx.note("wave n=" + num(n) + " weak=" + num(errs.back().weak) + " ladder=" + num(lad));
  }
  detail::add_decay_rows(rep, scales, errs, weak, ctx.tol("final", 0.05), ctx.tol("slope", -0.5), "pairing error");
  detail::check_ordering(rep, errs);
  rep.check("elliptic ladder pairing error at final scale", ladder_last, "<=", ctx.tol("ladder", 0.05));
  rep.check("three-factor vs direct elliptic solve", factor_gap, "<=", 1e-8);
  rep.check("projection defect", proj_defect, "<=", 1e-12);
  return rep;
}

}  // namespace evo
