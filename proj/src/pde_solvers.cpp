// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "evocalc/evo_solvers.hpp"

namespace evo {

namespace {

// Smallest eigenvalue of the Hermitian part; Gershgorin lower bound for large non-diagonal matrices.
double hermitian_min(const SparseC& s) {
  const SparseC h = 0.5 * (s + SparseC(s.adjoint()));
  const Index d = h.rows();
  bool diagonal = true;
  for (Index k = 0; k < h.outerSize() && diagonal; ++k)
    for (SparseC::InnerIterator it(h, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
    for (Index k = 0; k < h.outerSize(); ++k)
      for (SparseC::InnerIterator it(h, k); it; ++it) diag[it.row()] = it.value().real();
    return d > 0 ? diag.minCoeff() : std::numeric_limits<double>::infinity();
  }
  if (d <= 600) {
    const CMatrix dense(h);
    return Eigen::SelfAdjointEigenSolver<CMatrix>(dense, Eigen::EigenvaluesOnly).eigenvalues()[0];
  }
  Eigen::VectorXd centre = Eigen::VectorXd::Zero(d), radius = Eigen::VectorXd::Zero(d);
  for (Index k = 0; k < h.outerSize(); ++k)
    for (SparseC::InnerIterator it(h, k); it; ++it) {
      if (it.row() == it.col())
        centre[it.row()] = it.value().real();
      else
        radius[it.row()] += std::abs(it.value());
    }
  return (centre - radius).minCoeff();
}

Coefficient mprime_of(const PdeSystem& sys) {
  if (sys.Mprime) return *sys.Mprime;
  if (sys.M.derivative()) return *sys.M.derivative();
  require(!sys.M.time_dependent(), ErrorCode::PreconditionFailed,
          "pde: time-dependent M needs an analytic derivative M'");
  return Coefficient::zero(sys.M.dim());
}

void check_dims(const PdeSystem& sys, Index dim) {
  require(sys.M.dim() == dim && sys.N.dim() == dim && sys.A.dim() == dim, ErrorCode::DimMismatch,
          "pde: M, N, A and f must share one dimension");
  const double scale = std::max(1.0, sys.A.dim() > 0 ? CMatrix(sys.A.matrix()).cwiseAbs().maxCoeff() : 1.0);
  require(sys.A.skew_defect() <= 1e-12 * scale, ErrorCode::PreconditionFailed, "pde: A is not skew");
}

double norm_prefix(const Signal& f, Index k_end) {
  double acc = 0.0;
  for (Index k = 0; k < std::min(k_end, f.size()); ++k) acc += f.grid().weight(k) * f.values().col(k).squaredNorm();
  return std::sqrt(acc);
}

Index last_support(const Signal& f) {
  for (Index k = f.size() - 1; k >= 0; --k)
    if (f.values().col(k).cwiseAbs().maxCoeff() != 0.0) return k + 1;
  return 0;
}

Signal step_pde(const PdeSystem& sys, const Signal& f) {
  const TimeGrid& g = f.grid();
  const Index d = f.dim();
  const double inv = 1.0 / g.dt;
  const bool td = sys.M.time_dependent() || sys.N.time_dependent();
  Eigen::SparseLU<SparseC> lu;
  SparseC Mk;
  CVector prev_mu = CVector::Zero(d);
  Signal u(g, d);
  for (Index k = 0; k < g.n; ++k) {
    const double t = g.node(k);
    if (k == 0 || td) {
      Mk = sys.M.assemble(t);
      SparseC K = inv * Mk + sys.N.assemble(t) + sys.A.matrix();
      K.makeCompressed();
      lu.compute(K);
      require(lu.info() == Eigen::Success, ErrorCode::Numerical, "pde: step matrix factorization failed");
    }
    const CVector rhs = f.values().col(k) + inv * prev_mu;
    CVector x = lu.solve(rhs);
    require(lu.info() == Eigen::Success && x.allFinite(), ErrorCode::Numerical, "pde: per-step solve failed");
    u.values().col(k) = x;
    prev_mu = Mk * x;
  }
  return u;
}

}  // namespace

double pde_positivity(const PdeSystem& sys, const TimeGrid& grid, double nu, Index stride) {
  const Coefficient mp = mprime_of(sys);
  const bool td = sys.M.time_dependent() || sys.N.time_dependent() || mp.time_dependent();
  stride = td ? std::max<Index>(1, stride) : grid.n;
  double lo = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < grid.n; k += stride) {
    const double t = grid.node(k);
    const SparseC s = nu * sys.M.assemble(t) + 0.5 * mp.assemble(t) + sys.N.assemble(t);
    lo = std::min(lo, hermitian_min(s));
  }
  return lo;
}

Signal solve_evo_pde(const PdeSystem& sys, const Signal& f_in, double nu, const PdeOptions& opt, PdeSolveInfo* info) {
  require(nu > 0, ErrorCode::InvalidArgument, "pde: nu must be positive");
  require(sys.c > 0, ErrorCode::InvalidArgument, "pde: c must be positive");
  const Signal f = f_in.with_nu(nu);
  check_dims(sys, f.dim());
  PdeSolveInfo local;
  if (opt.check_positivity) {
    local.min_positivity = pde_positivity(sys, f.grid(), nu, opt.positivity_stride);
    require(local.min_positivity >= sys.c * (1.0 - 1e-9), ErrorCode::PreconditionFailed,
            "pde: Re(nu M + M'/2) + Re N >= c fails (min " + std::to_string(local.min_positivity) + ")");
  }
  Signal u = step_pde(sys, f);
  const double fn = norm_nu(f);
  if (opt.check_norm && fn > 0) {
    local.norm_ratio = norm_nu(u) * sys.c / fn;
    require(local.norm_ratio <= 1.0 + opt.norm_slack, ErrorCode::Numerical,
            "pde: solution violates ||u|| <= ||f|| / c (ratio " + std::to_string(local.norm_ratio) + ")");
  }
  if (opt.check_causality && fn > 0) {
    const Index ks = f.support_start(), ke = last_support(f);
    const Index km = ks + (ke - ks) / 2;
    if (km > ks) {
      const Signal u2 = step_pde(sys, truncate_before(f, f.grid().node(km)));
      local.causality = norm_prefix(u - u2, km) / fn;
      require(local.causality <= 1e-10, ErrorCode::Numerical, "pde: solution map failed the causality check");
    }
  }
  if (info) *info = local;
  return u;
}

CausalOp pde_solution_op(const PdeSystem& sys, PdeOptions opt) {
  const bool ti = !(sys.M.time_dependent() || sys.N.time_dependent());
  const Index d = sys.M.dim();
  return CausalOp(d, d, [sys, opt](const Signal& f) { return solve_evo_pde(sys, f, f.grid().nu, opt); }, {true, ti},
                  {}, "pde solution");
}

Signal apply_evo_pde(const PdeSystem& sys, const Signal& u) {
  check_dims(sys, u.dim());
  Signal out = derivative(multiply(sys.M, u));
  out += multiply(sys.N, u);
  out.values() += sys.A.matrix() * u.values();
  return out;
}

Signal discrete_commutator(const Coefficient& m, const Signal& g) {
  require(m.dim() == g.dim(), ErrorCode::DimMismatch, "commutator: dims differ");
  Signal out(g.grid(), g.dim());
  if (!m.time_dependent()) return out;
  const TimeGrid& grid = g.grid();
  const double inv = 1.0 / grid.dt;
  SparseC prev = m.assemble(grid.node(0));
  for (Index k = 1; k < grid.n; ++k) {
    SparseC cur = m.assemble(grid.node(k));
    out.values().col(k) = inv * ((cur - prev) * g.values().col(k - 1));
    prev = std::move(cur);
  }
  return out;
}

double funid_residual(const PdeSystem& mn, const PdeSystem& op, const Signal& f) {
  PdeOptions fast;
  fast.check_causality = false;
  fast.check_norm = false;
  const double nu = f.grid().nu;
  const Signal g = solve_evo_pde(op, f, nu, fast);
  const Signal h = antiderivative(g);
  const Signal b = apply_evo_pde(op, h);
  const Signal lhs = solve_evo_pde(mn, b, nu, fast) - solve_evo_pde(op, b, nu, fast);
  Signal x = multiply(op.M, g) - multiply(mn.M, g);
  x += discrete_commutator(op.M, h) - discrete_commutator(mn.M, h);
  x += multiply(op.N, h) - multiply(mn.N, h);
  const Signal rhs = solve_evo_pde(mn, x, nu, fast);
  const double den = std::max(norm_nu(lhs), norm_nu(rhs));
  if (den == 0.0) return 0.0;
  return norm_nu(lhs - rhs) / den;
}

NormEstimateCheck cdpden_check(const PdeSystem& mn, const PdeSystem& op, const ProbeSet& probes, double slack) {
  PdeOptions fast;
  fast.check_causality = false;
  const double nu = probes.grid().nu;
  NormEstimateCheck out;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  bool ok = true;
  for (const auto& phi : probes.probes()) {
    const double pn = norm_nu(phi);
    if (pn == 0.0) continue;
    const Signal g = solve_evo_pde(op, phi, nu, fast);
    const Signal h = antiderivative(g);
    const Signal l = solve_evo_pde(mn, apply_evo_pde(op, h), nu, fast) - h;
    const double a1 = norm_nu(multiply(mn.M, g) - multiply(op.M, g)) / pn;
    const double a2 = norm_nu(discrete_commutator(mn.M, h) - discrete_commutator(op.M, h)) / pn;
    const double a3 = norm_nu(multiply(mn.N, h) - multiply(op.N, h)) / pn;
    const double lhs = norm_nu(l) / pn;
    const double rhs = (a1 + a2 + a3) / mn.c;
    out.lhs = std::max(out.lhs, lhs);
    t1 = std::max(t1, a1);
    t2 = std::max(t2, a2);
    t3 = std::max(t3, a3);
    if (rhs > 0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
    ok = ok && lhs <= rhs * (1.0 + slack) + 1e-13;
  }
  out.rhs = (t1 + t2 + t3) / mn.c;
  out.holds = ok && out.lhs <= out.rhs * (1.0 + slack) + 1e-13;
  return out;
}

PdeSystem maxwell_system(const Maxwell1D& m) {
  require(m.cells >= 2, ErrorCode::InvalidArgument, "maxwell: need at least two cells");
  const Index p = m.cells - 1;
  require(m.eps.dim() == p && m.sigma.dim() == p && m.mu.dim() == m.cells, ErrorCode::DimMismatch,
          "maxwell: eps, sigma on the m-1 nodes and mu on the m cells");
  PdeSystem s;
  s.M = Coefficient::block_diagonal({m.eps, m.mu});
  if (m.eps.time_dependent() || m.mu.time_dependent()) {
    require(m.eps.derivative() != nullptr || !m.eps.time_dependent(), ErrorCode::PreconditionFailed,
            "maxwell: time-dependent eps needs its derivative");
    require(!m.mu.time_dependent(), ErrorCode::InvalidArgument, "maxwell: mu must not depend on time");
    const Coefficient de = m.eps.derivative() ? *m.eps.derivative() : Coefficient::zero(p);
    s.Mprime = Coefficient::block_diagonal({de, Coefficient::zero(m.cells)});
  }
  s.N = Coefficient::block_diagonal({m.sigma, Coefficient::zero(m.cells)});
  s.A = SpatialOperator::grad_div_1d(m.cells, m.length);
  s.c = m.c;
  return s;
}

bool maxwell_premise(const Maxwell1D& m, const TimeGrid& grid, const std::vector<double>& etas, Index stride) {
  const Coefficient de = m.eps.derivative() ? *m.eps.derivative() : Coefficient::zero(m.eps.dim());
  if (m.eps.time_dependent() && !m.eps.derivative()) return false;
  stride = std::max<Index>(1, stride);
  for (double eta : etas)
    for (Index k = 0; k < grid.n; k += stride) {
      const double t = grid.node(k);
      const SparseC s = eta * m.eps.assemble(t) + 0.5 * de.assemble(t);
      if (hermitian_min(s) < -1e-12) return false;
    }
  return true;
}

Signal maxwell_1d_solve(const Maxwell1D& m, const Signal& J, double nu, const PdeOptions& opt) {
  const Index p = m.cells - 1;
  require(J.dim() == p, ErrorCode::DimMismatch, "maxwell: J lives on the m-1 nodes");
  require(maxwell_premise(m, J.grid(), {nu}), ErrorCode::PreconditionFailed,
          "maxwell: nu eps + eps'/2 >= 0 fails at a sampled node");
  const PdeSystem sys = maxwell_system(m);
  Signal rhs(J.grid(), p + m.cells);
  rhs.values().topRows(p) = J.values();
  return solve_evo_pde(sys, rhs, nu, opt);
}

PdeSystem heat_system(const Coefficient& a, Index cells, double length, double c) {
  require(a.dim() == cells && a.pointwise(), ErrorCode::DimMismatch, "heat: a must be a cell profile");
  PdeSystem s;
  s.M = Coefficient::block_diagonal({Coefficient::identity(cells - 1), Coefficient::zero(cells)});
  s.N = Coefficient::block_diagonal({Coefficient::zero(cells - 1), a.inverse()});
  s.A = SpatialOperator::grad_div_1d(cells, length);
  s.c = c;
  return s;
}

PdeSystem wave_system(const Coefficient& a, Index cells, double length, double nu) {
  require(a.dim() == cells && a.pointwise() && !a.time_dependent(), ErrorCode::InvalidArgument,
          "wave: a must be a time-independent cell profile");
  const SpatialOperator A = SpatialOperator::grad_div_1d_projected(cells, length);
  const CMatrix pi = A.projection();
  const CMatrix da = CMatrix(a.assemble(0.0));
  const CMatrix block = pi * da * pi + (CMatrix::Identity(cells, cells) - pi);
  const CMatrix inv = block.inverse();
  const SparseC inv_s = inv.sparseView();
  PdeSystem s;
  s.M = Coefficient::block_diagonal(
      {Coefficient::identity(cells - 1), Coefficient::operator_profile(cells, [inv_s](double) { return inv_s; }, false)});
  s.N = Coefficient::zero(2 * cells - 1);
  s.A = A;
  // Hermitian part of nu M is bounded below by nu min(1, 1/|a|_inf).
  const double amax = a.sup_norm(TimeGrid(0.0, 1.0, 2, 0.0));
  s.c = nu * std::min(1.0, 1.0 / std::max(amax, 1.0));
  return s;
}

Signal wave_1d_solve(const Coefficient& a, Index cells, double length, const Signal& data) {
  require(a.dim() == cells && a.pointwise() && !a.time_dependent(), ErrorCode::InvalidArgument,
          "wave: a must be a time-independent cell profile");
  const Index p = cells - 1;
  require(data.dim() == p + cells, ErrorCode::DimMismatch, "wave: data lives on nodes and cells");
  const TimeGrid& g = data.grid();
  const double dt = g.dt;
  const SpatialOperator A = SpatialOperator::grad_div_1d_projected(cells, length);
  const SparseC G = A.grad0();
  const SparseC Gt = SparseC(G.transpose());
  const SparseC Da = a.assemble(0.0);
  SparseC K = SparseC(Gt * Da * G) * (dt * dt);
  SparseC I(p, p);
  I.setIdentity();
  K += I;
  K.makeCompressed();
  Eigen::SparseLU<SparseC> lu;
  lu.compute(K);
  require(lu.info() == Eigen::Success, ErrorCode::Numerical, "wave: factorization failed");
  auto project = [](const CVector& x) { return CVector(x.array() - x.mean()); };
  Signal out(g, p + cells);
  CVector v = CVector::Zero(p), flux = CVector::Zero(cells);
  for (Index k = 0; k < g.n; ++k) {
    const CVector f = data.values().col(k).head(p);
    const CVector gk = project(data.values().col(k).tail(cells));
    const CVector rhs = v + dt * f + dt * (Gt * flux) + (dt * dt) * (Gt * (Da * gk));
    v = lu.solve(rhs);
    flux += dt * project(Da * CVector(gk - G * v));
    out.values().col(k).head(p) = v;
    out.values().col(k).tail(cells) = flux;
  }
  return out;
}

}  // namespace evo
