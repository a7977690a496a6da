// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include <cmath>

#include "evocalc/evo_solvers.hpp"

namespace evo {

namespace {

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()[0];
}

double hermitian_min(const CMatrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  const CMatrix h = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

// Per-node dense data of an OdeBlockSystem, cached once when nothing depends on time.
class OdeNodes {
 public:
  OdeNodes(const OdeBlockSystem& sys, const TimeGrid& g) : sys_(sys), grid_(g) {
    require(sys.M.dim() == sys.m0, ErrorCode::DimMismatch, "ode: M must be m0 x m0");
    require(sys.N.dim() == sys.m0 + sys.m1, ErrorCode::DimMismatch, "ode: N must be (m0+m1) x (m0+m1)");
    td_ = sys.M.time_dependent() || sys.N.time_dependent();
    if (!td_) cached_ = build(g.t0);
  }

  struct Node {
    CMatrix m, n00, n01, n10, n11;
  };

  const Node& at(Index k) const {
    if (!td_) return cached_;
    scratch_ = build(grid_.node(k));
    return scratch_;
  }
  bool time_dependent() const { return td_; }

 private:
  Node build(double t) const {
    Node d;
    d.m = CMatrix(sys_.M.assemble(t));
    const CMatrix n = CMatrix(sys_.N.assemble(t));
    const Index a = sys_.m0, b = sys_.m1;
    d.n00 = n.topLeftCorner(a, a);
    d.n01 = n.topRightCorner(a, b);
    d.n10 = n.bottomLeftCorner(b, a);
    d.n11 = n.bottomRightCorner(b, b);
    return d;
  }

  const OdeBlockSystem& sys_;
  TimeGrid grid_;
  bool td_ = false;
  Node cached_;
  mutable Node scratch_;
};

Index sample_stride(const TimeGrid& g) { return std::max<Index>(1, g.n / 256); }

void check_ode_positivity(const OdeBlockSystem& sys, const TimeGrid& g) {
  OdeNodes nodes(sys, g);
  const Index stride = nodes.time_dependent() ? sample_stride(g) : g.n;
  for (Index k = 0; k < g.n; k += stride) {
    const auto& d = nodes.at(k);
    require(hermitian_min(d.m) >= sys.c * (1.0 - 1e-12), ErrorCode::PreconditionFailed,
            "ode: Re M >= c fails at a sampled node");
    if (sys.m1 > 0)
      require(hermitian_min(d.n11) >= sys.c * (1.0 - 1e-12), ErrorCode::PreconditionFailed,
              "ode: Re N11 >= c fails at a sampled node");
  }
}

}  // namespace

OdeBlockSystem OdeBlockSystem::from_blocks(const CMatrix& m, const CMatrix& n00, const CMatrix& n01,
                                           const CMatrix& n10, const CMatrix& n11, double c) {
  const Index a = m.rows(), b = n11.rows();
  require(n00.rows() == a && n00.cols() == a && n01.rows() == a && n01.cols() == b && n10.rows() == b &&
              n10.cols() == a && n11.cols() == b,
          ErrorCode::DimMismatch, "ode: inconsistent block sizes");
  CMatrix n(a + b, a + b);
  n << n00, n01, n10, n11;
  OdeBlockSystem s;
  s.M = Coefficient::constant(m);
  s.N = Coefficient::constant(n);
  s.m0 = a;
  s.m1 = b;
  s.c = c;
  return s;
}

OdeBlockNorms ode_block_norms(const OdeBlockSystem& sys, const TimeGrid& grid, Index stride) {
  OdeNodes nodes(sys, grid);
  OdeBlockNorms out;
  const Index st = nodes.time_dependent() ? std::max<Index>(1, stride) : grid.n;
  for (Index k = 0; k < grid.n; k += st) {
    const auto& d = nodes.at(k);
    out.n00 = std::max(out.n00, spectral_norm(d.n00));
    out.n01 = std::max(out.n01, spectral_norm(d.n01));
    out.n10 = std::max(out.n10, spectral_norm(d.n10));
    out.n11 = std::max(out.n11, spectral_norm(d.n11));
  }
  return out;
}

double ode_theta(const OdeBlockNorms& n, double c, double nu) {
  return (c * n.n00 + n.n01 * n.n10) / (nu * c * c);
}

double ode_residual_bound(const OdeBlockNorms& n, double c, double nu) {
  const double theta = ode_theta(n, c, nu);
  require(theta < 1.0, ErrorCode::PreconditionFailed, "ode: theta >= 1");
  const double c3 = c * c * c;
  return (c * n.n01 + n.n01 * n.n10) / (c3 * nu) +
         theta / (1.0 - theta) * (1.0 / c + n.n01 / (c * c * nu) + n.n10 / (c * c) + n.n01 * n.n10 / (c3 * nu));
}

Signal ode_time_step(const OdeBlockSystem& sys, const Signal& F) {
  const TimeGrid& g = F.grid();
  const Index a = sys.m0, b = sys.m1;
  require(F.dim() == a + b, ErrorCode::DimMismatch, "ode: F must have dim m0 + m1");
  OdeNodes nodes(sys, g);
  Signal U(g, a + b);
  const double inv = 1.0 / g.dt;
  Eigen::PartialPivLU<CMatrix> lu;
  CVector prev_mu = CVector::Zero(a);  // M_{k-1} U0_{k-1}
  for (Index k = 0; k < g.n; ++k) {
    const auto& d = nodes.at(k);
    if (k == 0 || nodes.time_dependent()) {
      CMatrix K(a + b, a + b);
      K << d.m * inv + d.n00, d.n01, d.n10, d.n11;
      lu.compute(K);
    }
    CVector rhs = F.values().col(k);
    rhs.head(a) += inv * prev_mu;
    const CVector u = lu.solve(rhs);
    U.values().col(k) = u;
    prev_mu = d.m * u.head(a);
  }
  return U;
}

Signal ode_neumann(const OdeBlockSystem& sys, const Signal& F, double theta, double tol, Index* terms) {
  const TimeGrid& g = F.grid();
  const Index a = sys.m0, b = sys.m1;
  require(F.dim() == a + b, ErrorCode::DimMismatch, "ode: F must have dim m0 + m1");
  require(theta < 1.0, ErrorCode::PreconditionFailed, "ode: theta >= 1, the block series does not contract");
  OdeNodes nodes(sys, g);
  struct Pre {
    CMatrix minv, r, n11inv, n01n11inv, n10;
  };
  auto prepare = [&](Index k) {
    const auto& d = nodes.at(k);
    Pre p;
    p.minv = d.m.inverse();
    p.n10 = d.n10;
    if (b > 0) {
      p.n11inv = d.n11.inverse();
      p.n01n11inv = d.n01 * p.n11inv;
      p.r = d.n00 - p.n01n11inv * d.n10;
    } else {
      p.r = d.n00;
    }
    return p;
  };
  std::vector<Pre> pre;
  if (nodes.time_dependent()) {
    pre.reserve(static_cast<size_t>(g.n));
    for (Index k = 0; k < g.n; ++k) pre.push_back(prepare(k));
  } else {
    pre.push_back(prepare(0));
  }
  auto P = [&](Index k) -> const Pre& { return pre.size() == 1 ? pre[0] : pre[static_cast<size_t>(k)]; };

  auto nodewise = [&](const Signal& x, auto&& pick) {
    Signal y(g, a);
    for (Index k = 0; k < g.n; ++k) y.values().col(k) = pick(P(k)) * x.values().col(k);
    return y;
  };
  // g0 = F0 - N01 N11^{-1} F1.
  Signal g0(g, a);
  g0.values() = F.values().topRows(a);
  if (b > 0) {
    Signal f1(g, b);
    f1.values() = F.values().bottomRows(b);
    for (Index k = 0; k < g.n; ++k) g0.values().col(k) -= P(k).n01n11inv * f1.values().col(k);
  }
  const auto minv = [](const Pre& p) -> const CMatrix& { return p.minv; };
  const auto rmat = [](const Pre& p) -> const CMatrix& { return p.r; };
  Signal y = nodewise(antiderivative(g0), minv);
  Signal x = y;
  const Index K = neumann_terms(theta, tol, 1.0);
  if (terms) *terms = K;
  for (Index k = 0; k < K; ++k) {
    y = nodewise(antiderivative(nodewise(y, rmat)), minv);
    y *= -1.0;
    x += y;
  }
  Signal U(g, a + b);
  U.values().topRows(a) = x.values();
  if (b > 0)
    for (Index k = 0; k < g.n; ++k)
      U.values().col(k).tail(b) = P(k).n11inv * (F.values().col(k).tail(b) - P(k).n10 * x.values().col(k));
  return U;
}

Signal solve_ode_block(const OdeBlockSystem& sys, const Signal& F, double nu, double tol, OdeSolveInfo* info) {
  require(nu > 0, ErrorCode::InvalidArgument, "ode: nu must be positive");
  require(tol > 0, ErrorCode::InvalidArgument, "ode: tol must be positive");
  require(sys.c > 0, ErrorCode::InvalidArgument, "ode: c must be positive");
  const Signal f = F.with_nu(nu);
  const TimeGrid& g = f.grid();
  check_ode_positivity(sys, g);
  OdeSolveInfo local;
  local.norms = ode_block_norms(sys, g, sample_stride(g));
  local.nu_eff = (1.0 - std::exp(-nu * g.dt)) / g.dt;
  local.theta = ode_theta(local.norms, sys.c, local.nu_eff);
  require(local.theta < 1.0, ErrorCode::PreconditionFailed,
          "ode: theta = " + std::to_string(local.theta) + " >= 1, increase nu");
  const Signal ua = ode_neumann(sys, f, local.theta, 1e-3 * tol, &local.neumann_terms);
  const Signal ub = ode_time_step(sys, f);
  const double den = norm_nu(ub);
  local.route_discrepancy = den > 0 ? norm_nu(ua - ub) / den : norm_nu(ua - ub);
  if (info) *info = local;
  require(local.route_discrepancy <= tol, ErrorCode::Numerical,
          "ode: Neumann and time-stepping routes disagree (" + std::to_string(local.route_discrepancy) + ")");
  return ub;
}

CausalOp ode_solution_op(const OdeBlockSystem& sys, double tol) {
  const bool ti = !(sys.M.time_dependent() || sys.N.time_dependent());
  return CausalOp(sys.m0 + sys.m1, sys.m0 + sys.m1,
                  [sys, tol](const Signal& f) { return solve_ode_block(sys, f, f.grid().nu, tol); }, {true, ti}, {},
                  "ode solution");
}

Signal picard_solve(const std::function<CVector(const CVector&)>& F, double lip, const Signal& f, double tol,
                    PicardInfo* info, int max_iterations) {
  require(lip > 0, ErrorCode::InvalidArgument, "picard: lip must be positive");
  require(tol > 0, ErrorCode::InvalidArgument, "picard: tol must be positive");
  const double nu = 2.0 * lip;
  const Signal rhs = f.with_nu(nu);
  const TimeGrid& g = rhs.grid();
  const double nu_eff = (1.0 - std::exp(-nu * g.dt)) / g.dt;
  PicardInfo local;
  local.nu = nu;
  local.kappa = lip / nu_eff;
  auto apply_F = [&](const Signal& u) {
    Signal out(g, u.dim());
    for (Index k = 0; k < g.n; ++k) {
      CVector v = F(u.values().col(k));
      require(v.size() == u.dim(), ErrorCode::DimMismatch, "picard: F changed the dimension");
      out.values().col(k) = v;
    }
    return out;
  };
  Signal u(g, f.dim());
  for (int it = 1; it <= max_iterations; ++it) {
    Signal next = antiderivative(apply_F(u) + rhs);
    local.last_gap = norm_nu(next - u);
    u = std::move(next);
    local.iterations = it;
    if (local.last_gap <= tol * (1.0 - local.kappa) * std::max(1.0, norm_nu(u))) {
      local.residual = max_abs(derivative(u) - apply_F(u) - rhs);
      if (local.residual <= 10.0 * tol) {
        if (info) *info = local;
        return u;
      }
    }
  }
  if (info) *info = local;
  fail(ErrorCode::Numerical, "picard: no convergence within the iteration budget");
}

}  // namespace evo
