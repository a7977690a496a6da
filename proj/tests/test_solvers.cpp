// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "evocalc/causal_op.hpp"
#include "evocalc/error.hpp"
#include "evocalc/evo_solvers.hpp"
#include "evocalc/spatial.hpp"
#include "evocalc/time_calculus.hpp"

using namespace evo;

namespace {

CMatrix random_matrix(Rng& rng, Index r, Index c, double norm) {
  CMatrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = rng.complex_normal();
  return m * (norm / Eigen::JacobiSVD<CMatrix>(m).singularValues()[0]);
}

CMatrix accretive(Rng& rng, Index d) {
  const CMatrix z = random_matrix(rng, d, d, 1.0);
  return CMatrix::Identity(d, d) + 0.3 * (z - z.adjoint()) + 0.2 * z * z.adjoint();
}

}  // namespace

TEST_CASE("scalar ODE time step is implicit Euler") {
  const TimeGrid g = TimeGrid::window(0.0, 2.0, 0.01, 1.0);
  const double a = 0.7;
  CMatrix m(1, 1), n(1, 1), e(1, 0), e2(0, 1), e3(0, 0);
  m << 1.0;
  n << a;
  const OdeBlockSystem sys = OdeBlockSystem::from_blocks(m, n, e, e2, e3, 1.0);
  const Signal f = Signal::scalar(g, [](double t) { return Complex(std::sin(3 * t)); });
  const Signal u = ode_time_step(sys, f);
  Complex prev = 0.0;
  for (Index k = 0; k < g.n; ++k) {
    const Complex want = (prev / g.dt + f.values()(0, k)) / (1.0 / g.dt + a);
    CHECK(std::abs(u.values()(0, k) - want) < 1e-12);
    prev = want;
  }
}

TEST_CASE("ODE block routes agree and zero data gives zero") {
  Rng rng(42);
  const OdeBlockSystem sys = OdeBlockSystem::from_blocks(accretive(rng, 2), random_matrix(rng, 2, 2, 1.0),
                                                         random_matrix(rng, 2, 1, 1.0), random_matrix(rng, 1, 2, 1.0),
                                                         accretive(rng, 1), 1.0);
  const TimeGrid g = TimeGrid::window(0.0, 1.0, 1e-3, 20.0);
  const ProbeSet p = ProbeSet::standard(g, 3, 1, 3, 0.8);
  for (const auto& f : p.probes()) {
    OdeSolveInfo info;
    const Signal u = solve_ode_block(sys, f, 20.0, 1e-6, &info);
    CHECK(info.theta < 1.0);
    CHECK(info.route_discrepancy <= 1e-6);
    CHECK(norm_nu(u - ode_time_step(sys, f)) <= 1e-6 * norm_nu(u));
  }
  CHECK(norm_nu(ode_time_step(sys, Signal(g, 3))) == 0.0);
  // theta >= 1 has no contraction certificate.
  const TimeGrid slow = g.with_nu(0.1);
  CHECK_THROWS_AS(solve_ode_block(sys, Signal(slow, 3), 0.1), Error);
}

TEST_CASE("ODE block theta follows its formula") {
  OdeBlockNorms n;
  n.n00 = 0.5;
  n.n01 = 2.0;
  n.n10 = 0.25;
  CHECK(ode_theta(n, 2.0, 10.0) == doctest::Approx((2.0 * 0.5 + 0.5) / (10.0 * 4.0)));
}

TEST_CASE("Picard matches an independent RK4 reference") {
  const TimeGrid g = TimeGrid::window(0.0, 6.0, 1e-3, 2.0);
  auto pulse = [](double t) { return 2.0 * std::exp(-0.5 * std::pow((t - 1.5) / 0.4, 2)); };
  const Signal f = Signal::scalar(g, [&](double t) { return Complex(pulse(t)); });
  PicardInfo info;
  const Signal u =
      picard_solve([](const CVector& x) { return CVector(x.array().sin()); }, 1.0, f, 1e-12, &info);
  CHECK(info.kappa < 1.0);
  double u_rk = 0.0, t = 0.0, err = 0.0, peak = 0.0;
  const int sub = 10;
  const double h = g.dt / sub;
  auto rhs = [&](double s, double x) { return std::sin(x) + pulse(s); };
  for (Index k = 1; k < g.n; ++k) {
    for (int i = 0; i < sub; ++i) {
      const double k1 = rhs(t, u_rk), k2 = rhs(t + h / 2, u_rk + h / 2 * k1), k3 = rhs(t + h / 2, u_rk + h / 2 * k2),
                   k4 = rhs(t + h, u_rk + h * k3);
      u_rk += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    err = std::max(err, std::abs(u.values()(0, k) - u_rk));
    peak = std::max(peak, std::abs(u_rk));
  }
  CHECK(err / peak <= 1e-3);
  const Signal zero = picard_solve([](const CVector& x) { return CVector(x.array().sin()); }, 1.0, Signal(g, 1));
  CHECK(max_abs(zero) == 0.0);
}

TEST_CASE("heat and Maxwell solutions satisfy their equations") {
  const Index cells = 12;
  const Eigen::VectorXd x = cell_centers(cells);
  const Coefficient a = Coefficient::scalar_space(cells, [x](Index i) { return Complex(1.0 + 0.5 * std::sin(6.0 * x[i])); });
  const PdeSystem heat = heat_system(a, cells, 1.0, 0.5);
  const TimeGrid g = TimeGrid::window(0.0, 2.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 2 * cells - 1, 3, 2, 1.5);
  for (const auto& f : p.probes()) {
    PdeSolveInfo info;
    const Signal u = solve_evo_pde(heat, f, 1.0, {}, &info);
    CHECK(norm_nu(apply_evo_pde(heat, u) - f) <= 1e-9 * norm_nu(f));
    CHECK(info.norm_ratio <= 1.05);
  }
  Maxwell1D m;
  m.cells = cells;
  m.eps = Coefficient::identity(cells - 1);
  m.mu = Coefficient::identity(cells);
  m.sigma = Coefficient::identity(cells - 1, 0.5);
  const ProbeSet pj = ProbeSet::standard(g, cells - 1, 4, 2, 1.5);
  for (const auto& j : pj.probes()) {
    const Signal u = maxwell_1d_solve(m, j, 1.0);
    CHECK(u.dim() == 2 * cells - 1);
    CHECK(std::isfinite(norm_nu(u)));
  }
  Maxwell1D eddy = m;
  eddy.eps = Coefficient::zero(cells - 1);
  CHECK(maxwell_premise(eddy, g, {1.0, 4.0}));
}

TEST_CASE("fast elliptic solve agrees with the direct one and a = 1 gives the parabola") {
  const Index cells = 32;
  const Eigen::VectorXd xc = cell_centers(cells);
  const Coefficient a = Coefficient::scalar_space(cells, [xc](Index i) { return Complex(2.0 + std::sin(2 * std::numbers::pi * xc[i])); });
  const Eigen::VectorXd xn = interior_nodes(cells);
  const CVector f = (1.0 + (3.0 * xn.array()).cos()).cast<Complex>();
  CHECK((elliptic_solve(a, f, cells) - elliptic_solve_direct(a, f, cells)).norm() <= 1e-10 * f.norm());
  // -u'' = 1 with zero ends: u = x (1 - x) / 2, exact for the three-point stencil.
  const CVector one = CVector::Ones(cells - 1);
  const CVector u = elliptic_solve(Coefficient::identity(cells), one, cells);
  for (Index i = 0; i < cells - 1; ++i) CHECK(std::abs(u[i] - xn[i] * (1 - xn[i]) / 2) < 1e-12);
}

TEST_CASE("spatial operators are skew and projections idempotent") {
  const SpatialOperator a = SpatialOperator::grad_div_1d(10);
  CHECK(a.skew_defect() <= 1e-14);
  const SpatialOperator b = SpatialOperator::grad_div_1d_projected(10);
  CHECK(b.projection_defect() <= 1e-12);
  const CMatrix pi = b.projection();
  CHECK((pi * pi - pi).norm() <= 1e-12);
  CHECK(harmonic_mean({1.0, 4.0}) == doctest::Approx(1.6));
  CHECK(arithmetic_mean({1.0, 4.0}) == doctest::Approx(2.5));
}

TEST_CASE("wave fast path agrees with the generic evolutionary solve") {
  const Index cells = 8;
  const Eigen::VectorXd xc = cell_centers(cells);
  const Coefficient a = Coefficient::scalar_space(cells, [xc](Index i) { return Complex(2.0 + std::sin(2 * std::numbers::pi * xc[i])); });
  const TimeGrid g = TimeGrid::window(0.0, 2.0, 0.01, 1.0);
  const PdeSystem sys = wave_system(a, cells, 1.0, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 2 * cells - 1, 6, 2, 1.5);
  for (const auto& f : p.probes()) {
    const Signal fast = wave_1d_solve(a, cells, 1.0, f);
    PdeOptions opt;
    opt.check_causality = false;
    const Signal slow = solve_evo_pde(sys, f, 1.0, opt);
    Signal vf(g, CMatrix(fast.values().topRows(cells - 1))), vs(g, CMatrix(slow.values().topRows(cells - 1)));
    CHECK(norm_nu(vf - vs) <= 1e-8 * norm_nu(vs));
  }
}

TEST_CASE("difference identity holds for random pairs") {
  const Index cells = 4;
  const SpatialOperator A = SpatialOperator::grad_div_1d(cells);
  const Index d = A.dim();
  Rng rng(5);
  auto make = [&] {
    PdeSystem s;
    s.M = Coefficient::constant(accretive(rng, d));
    s.N = Coefficient::constant(CMatrix(0.2 * accretive(rng, d)));
    s.A = A;
    s.c = 0.5;
    return s;
  };
  const PdeSystem mn = make(), op = make();
  const TimeGrid g = TimeGrid::window(0.0, 2.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::standard(g, d, 7, 2, 1.5);
  for (const auto& f : p.probes()) CHECK(funid_residual(mn, op, f) <= 1e-8);
  NormEstimateCheck c = cdpden_check(mn, op, p, 0.05);
  CHECK(c.holds);
  CHECK(c.lhs <= c.rhs * 1.05);
}
