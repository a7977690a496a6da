// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/causal_op.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace evo {

CausalOp::CausalOp(Index dim_in, Index dim_out, Action action, OpFlags flags, Action adjoint, std::string name)
    : dim_in_(dim_in), dim_out_(dim_out), action_(std::move(action)), adjoint_(std::move(adjoint)),
      flags_(flags), name_(std::move(name)) {
  require(dim_in >= 1 && dim_out >= 1, ErrorCode::InvalidArgument, "op: dims must be positive");
  require(static_cast<bool>(action_), ErrorCode::InvalidArgument, "op: missing action");
}

Signal CausalOp::operator()(const Signal& f) const {
  require(f.dim() == dim_in_, ErrorCode::DimMismatch, "op " + name_ + ": input dim mismatch");
  Signal g = action_(f);
  require(g.dim() == dim_out_, ErrorCode::DimMismatch, "op " + name_ + ": action returned wrong dim");
  return g;
}

Signal CausalOp::apply_adjoint(const Signal& g) const {
  require(has_adjoint(), ErrorCode::InvalidArgument, "op " + name_ + ": no adjoint available");
  require(g.dim() == dim_out_, ErrorCode::DimMismatch, "op " + name_ + ": adjoint input dim mismatch");
  return adjoint_(g);
}

bool CausalOp::has_dense_for(const TimeGrid& g) const { return dense_ && dense_->lattice.same_lattice(g); }

CausalOp CausalOp::with_dense(DenseMatrix d) const {
  const Index n = d.lattice.n;
  require(d.matrix.rows() == n * dim_out_ && d.matrix.cols() == n * dim_in_, ErrorCode::DimMismatch,
          "op: dense matrix has wrong size");
  CausalOp o = *this;
  o.dense_ = std::move(d);
  return o;
}

CausalOp CausalOp::with_name(std::string name) const {
  CausalOp o = *this;
  o.name_ = std::move(name);
  return o;
}

CausalOp CausalOp::with_flags(OpFlags f) const {
  CausalOp o = *this;
  o.flags_ = f;
  return o;
}

// ---------------------------------------------------------------------------
// Factories

CausalOp identity_op(Index dim) {
  auto id = [](const Signal& f) { return f; };
  return CausalOp(dim, dim, id, {true, true}, id, "identity");
}

CausalOp zero_op(Index dim_in, Index dim_out) {
  auto z = [dim_out](const Signal& f) { return Signal(f.grid(), dim_out); };
  auto za = [dim_in](const Signal& g) { return Signal(g.grid(), dim_in); };
  return CausalOp(dim_in, dim_out, z, {true, true}, za, "zero");
}

CausalOp scale_op(const CausalOp& s, Complex alpha) {
  CausalOp::Action adj;
  if (s.has_adjoint()) adj = [s, alpha](const Signal& g) { return std::conj(alpha) * s.apply_adjoint(g); };
  return CausalOp(s.dim_in(), s.dim_out(), [s, alpha](const Signal& f) { return alpha * s(f); }, s.flags(), adj,
                  "scaled " + s.name());
}

CausalOp antiderivative_op(Index dim) {
  return CausalOp(dim, dim, [](const Signal& f) { return antiderivative(f); }, {true, true},
                  [](const Signal& g) { return antiderivative_adjoint(g); }, "antiderivative");
}

CausalOp derivative_op(Index dim) {
  return CausalOp(dim, dim, [](const Signal& f) { return derivative(f); }, {true, true},
                  [](const Signal& g) { return derivative_adjoint(g); }, "derivative");
}

CausalOp shift_op(double h, Index dim) {
  return CausalOp(dim, dim, [h](const Signal& f) { return shift(f, h); }, {h <= 0.0, true},
                  [h](const Signal& g) { return shift(g, -h); }, "shift");
}

CausalOp multiply_op(const Coefficient& c) {
  auto adj = [c](const Signal& g) {
    Signal out(g.grid(), g.dim());
    if (!c.time_dependent()) {
      const SparseC m = c.assemble(g.grid().t0);
      out.values() = m.adjoint() * g.values();
      return out;
    }
    for (Index k = 0; k < g.size(); ++k) {
      const SparseC m = c.assemble(g.grid().node(k));
      out.values().col(k) = m.adjoint() * g.values().col(k);
    }
    return out;
  };
  return CausalOp(c.dim(), c.dim(), [c](const Signal& f) { return multiply(c, f); },
                  {true, !c.time_dependent()}, adj, "multiply");
}

CausalOp multiplier_op(const MultiplierFunction& m, int padding) {
  return CausalOp(m.dim, m.dim, [m, padding](const Signal& f) { return apply_multiplier(m, f, padding); },
                  {true, true}, {}, "multiplier");
}

namespace {

Signal resolvent_adjoint(const Signal& f, double eps) {
  const double a = eps / f.grid().dt;
  const double inv = 1.0 / (1.0 + a);
  Signal g(f.grid(), f.dim());
  CVector next = CVector::Zero(f.dim());
  for (Index k = f.size() - 1; k >= 0; --k) {
    next = inv * (f.values().col(k) + a * next);
    g.values().col(k) = next;
  }
  return g;
}

}  // namespace

CausalOp resolvent_op(double eps, Index dim) {
  require(eps > 0, ErrorCode::InvalidArgument, "resolvent: eps must be positive");
  return CausalOp(dim, dim, [eps](const Signal& f) { return resolvent(f, eps); }, {true, true},
                  [eps](const Signal& g) { return resolvent_adjoint(g, eps); }, "resolvent");
}

CausalOp compose(const CausalOp& s, const CausalOp& t) {
  require(s.dim_in() == t.dim_out(), ErrorCode::DimMismatch, "compose: " + s.name() + " o " + t.name());
  CausalOp::Action adj;
  if (s.has_adjoint() && t.has_adjoint())
    adj = [s, t](const Signal& g) { return t.apply_adjoint(s.apply_adjoint(g)); };
  OpFlags fl{s.flags().claims_causal && t.flags().claims_causal,
             s.flags().claims_translation_invariant && t.flags().claims_translation_invariant};
  return CausalOp(t.dim_in(), s.dim_out(), [s, t](const Signal& f) { return s(t(f)); }, fl, adj,
                  s.name() + " o " + t.name());
}

CausalOp add(const CausalOp& s, const CausalOp& t, Complex alpha) {
  require(s.dim_in() == t.dim_in() && s.dim_out() == t.dim_out(), ErrorCode::DimMismatch,
          "add: " + s.name() + " + " + t.name());
  CausalOp::Action adj;
  if (s.has_adjoint() && t.has_adjoint())
    adj = [s, t, alpha](const Signal& g) {
      Signal a = s.apply_adjoint(g);
      a.values() += std::conj(alpha) * t.apply_adjoint(g).values();
      return a;
    };
  OpFlags fl{s.flags().claims_causal && t.flags().claims_causal,
             s.flags().claims_translation_invariant && t.flags().claims_translation_invariant};
  return CausalOp(s.dim_in(), s.dim_out(),
                  [s, t, alpha](const Signal& f) {
                    Signal a = s(f);
                    a.values() += alpha * t(f).values();
                    return a;
                  },
                  fl, adj, s.name() + " + " + t.name());
}

CMatrix to_dense(const CausalOp& s, const TimeGrid& grid) {
  if (s.has_dense_for(grid)) return s.dense()->matrix;
  const Index nin = grid.n * s.dim_in();
  const Index nout = grid.n * s.dim_out();
  CMatrix a(nout, nin);
  Signal e(grid, s.dim_in());
  for (Index c = 0; c < nin; ++c) {
    e.values().setZero();
    e.values()(c % s.dim_in(), c / s.dim_in()) = 1.0;
    const Signal y = s(e);
    a.col(c) = Eigen::Map<const CVector>(y.values().data(), nout);
  }
  return a;
}

CausalOp materialize(const CausalOp& s, const TimeGrid& grid) {
  return s.with_dense({grid, to_dense(s, grid)});
}

// ---------------------------------------------------------------------------
// Norms

namespace {

Eigen::VectorXd node_weights(const TimeGrid& g, Index dim, double nu) {
  Eigen::VectorXd w(g.n * dim);
  for (Index k = 0; k < g.n; ++k) w.segment(k * dim, dim).setConstant(g.weight(k, nu));
  return w;
}

Signal weighted(const Signal& f, const Eigen::VectorXd& nodew, bool inverse) {
  Signal out = f;
  for (Index k = 0; k < f.size(); ++k) out.values().col(k) *= inverse ? 1.0 / nodew[k] : nodew[k];
  return out;
}

}  // namespace

NormEstimate dense_weighted_norm(const CMatrix& a, const TimeGrid& grid, Index dim_in, Index dim_out, double nu) {
  require(a.rows() == grid.n * dim_out && a.cols() == grid.n * dim_in, ErrorCode::DimMismatch,
          "dense norm: matrix size does not match the grid");
  const Eigen::VectorXd win = node_weights(grid, dim_in, nu).cwiseSqrt();
  const Eigen::VectorXd wout = node_weights(grid, dim_out, nu).cwiseSqrt();
  const CMatrix b = wout.asDiagonal() * a * win.cwiseInverse().asDiagonal();
  const Index N = b.cols();
  NormEstimate est;
  est.method = NormMethod::Dense;
  if (b.cwiseAbs().maxCoeff() == 0.0) {
    est.converged = true;
    return est;
  }
  // Lanczos with full reorthogonalization on b^H b.
  const Index mmax = std::min<Index>(N, 300);
  CMatrix V(N, mmax + 1);
  std::vector<double> alpha, beta;
  Rng rng(7);
  CVector v(N);
  for (Index i = 0; i < N; ++i) v[i] = rng.complex_normal();
  V.col(0) = v / v.norm();
  double prev = -1.0, lam = 0.0;
  for (Index j = 0; j < mmax; ++j) {
    CVector w = b.adjoint() * (b * V.col(j));
    const double aj = V.col(j).dot(w).real();
    alpha.push_back(aj);
    w -= aj * V.col(j);
    if (j > 0) w -= beta.back() * V.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
    const double bj = w.norm();
    const bool last = (j + 1 == mmax) || bj <= 1e-14 * std::abs(aj);
    if ((j + 1) % 5 == 0 || last) {
      const Index m = j + 1;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (Index i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<size_t>(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      lam = es.eigenvalues()[m - 1];
      const double resid = bj * std::abs(es.eigenvectors()(m - 1, m - 1));
      est.iterations = static_cast<int>(m);
      if (resid <= 1e-11 * lam || (prev > 0 && std::abs(lam - prev) <= 1e-13 * lam) || last) {
        est.converged = resid <= 1e-8 * lam || bj <= 1e-14 * std::abs(aj) || std::abs(lam - prev) <= 1e-13 * lam;
        break;
      }
      prev = lam;
    }
    beta.push_back(bj);
    V.col(j + 1) = w / bj;
  }
  est.value = std::sqrt(std::max(lam, 0.0));
  est.lower_estimate = !est.converged;
  return est;
}

double probe_sup(const CausalOp& s, double nu, const ProbeSet& probes) {
  double sup = 0.0;
  for (const auto& p : probes.probes()) {
    const double d = norm_nu(p, nu);
    if (d <= 0.0) continue;
    sup = std::max(sup, norm_nu(s(p), nu) / d);
  }
  return sup;
}

NormEstimate op_norm(const CausalOp& s, double nu, const ProbeSet& probes) {
  const TimeGrid& g = probes.grid();
  if (s.has_dense_for(g) && g.n * std::max(s.dim_in(), s.dim_out()) <= 4096)
    return dense_weighted_norm(s.dense()->matrix, g, s.dim_in(), s.dim_out(), nu);
  NormEstimate est;
  if (s.has_adjoint() && probes.size() > 0) {
    est.method = NormMethod::PowerIteration;
    const Eigen::VectorXd w = g.weights(nu);
    Signal x(g.with_nu(nu), s.dim_in());
    Rng rng(probes.seed() + 1);
    for (const auto& p : probes.probes()) x.values() += rng.normal() * p.values();
    double nx = norm_nu(x, nu);
    if (nx == 0.0) return est;
    x *= 1.0 / nx;
    double ray = 0.0, prev = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Signal y = s(x);
      ray = norm_nu(y, nu);
      est.iterations = it + 1;
      Signal z = weighted(s.apply_adjoint(weighted(y, w, false)), w, true);
      const double nz = norm_nu(z, nu);
      if (nz == 0.0) break;
      x = (1.0 / nz) * z;
      if (it > 10 && std::abs(ray - prev) <= 1e-10 * ray) {
        est.converged = true;
        break;
      }
      prev = ray;
    }
    est.value = std::max(ray, probe_sup(s, nu, probes));
    est.lower_estimate = !est.converged;
    return est;
  }
  est.method = NormMethod::ProbeSup;
  est.value = probe_sup(s, nu, probes);
  est.lower_estimate = true;
  return est;
}

// ---------------------------------------------------------------------------
// Causality diagnostics

namespace {

void require_aligned(const TimeGrid& g, double t) {
  const double s = (t - g.t0) / g.dt;
  require(std::abs(s - std::round(s)) <= 1e-9 * std::max(1.0, std::abs(s)), ErrorCode::InvalidArgument,
          "causality: t is not grid aligned");
}

double norm_prefix(const Signal& f, Index k_end, double nu) {
  double acc = 0.0;
  for (Index k = 0; k < std::min(k_end, f.size()); ++k) acc += f.grid().weight(k, nu) * f.values().col(k).squaredNorm();
  return std::sqrt(acc);
}

Index support_end(const Signal& f) {
  for (Index k = f.size() - 1; k >= 0; --k)
    if (f.values().col(k).cwiseAbs().maxCoeff() != 0.0) return k + 1;
  return 0;
}

}  // namespace

double causality_defect(const CausalOp& s, double t, const ProbeSet& probes, double nu) {
  require_aligned(probes.grid(), t);
  double worst = 0.0;
  for (const auto& p : probes.probes()) {
    const Index k = p.grid().first_at_or_after(t);
    const Signal a = s(p);
    const Signal b = s(truncate_before(p, t));
    const double d = norm_prefix(a - b, k, nu);
    worst = std::max(worst, d / std::max(norm_nu(p, nu), 1e-300));
  }
  return worst;
}

double max_causality_defect(const CausalOp& s, const ProbeSet& probes, double nu, Index stride) {
  stride = std::max<Index>(1, stride);
  double worst = 0.0;
  for (const auto& p : probes.probes()) {
    const Index ks = p.support_start();
    const Index ke = support_end(p);
    if (ks >= ke) continue;
    const Signal a = s(p);
    const double pn = std::max(norm_nu(p, nu), 1e-300);
    // For k <= ks the defect grows with k up to ||Q_t S p|| at ks; for k >= ke it vanishes.
    for (Index k = ks; k < ke; k += stride) {
      const Signal b = s(truncate_before(p, p.grid().node(k)));
      worst = std::max(worst, norm_prefix(a - b, k, nu) / pn);
    }
  }
  return worst;
}

double strong_causality_constant(const CausalOp& s, double t, const ProbeSet& probes, double nu) {
  require_aligned(probes.grid(), t);
  double c = 0.0;
  for (const auto& p : probes.probes()) {
    const Index k = p.grid().first_at_or_after(t);
    const double pn = norm_nu(p, nu);
    if (pn == 0.0) continue;
    const double num = norm_prefix(s(p), k, nu);
    const double den = norm_prefix(p, k, nu);
    if (den <= 1e-14 * pn) {
      if (num > 1e-12 * pn) return std::numeric_limits<double>::infinity();
      continue;
    }
    c = std::max(c, num / den);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Inversion

Index neumann_terms(double theta, double tol, double a_inv_norm) {
  require(theta >= 0 && theta < 1, ErrorCode::PreconditionFailed, "neumann: theta must lie in [0, 1)");
  require(tol > 0, ErrorCode::InvalidArgument, "neumann: tolerance must be positive");
  if (theta == 0.0 || a_inv_norm == 0.0) return 0;
  const double k = std::log(tol * (1.0 - theta) / a_inv_norm) / std::log(theta) - 1.0;
  return std::max<Index>(0, static_cast<Index>(std::ceil(k)));
}

CausalOp neumann_inverse(const CausalOp& a_inv, const CausalOp& n, const NeumannOptions& opt) {
  require(opt.theta_bound < 1.0, ErrorCode::PreconditionFailed, "neumann: theta >= 1, no contraction");
  require(a_inv.dim_in() == n.dim_out() && n.dim_in() == a_inv.dim_out(), ErrorCode::DimMismatch,
          "neumann: A_inv and N dims are incompatible");
  if (opt.probes) {
    const double cert = probe_sup(compose(a_inv, n), opt.probes->grid().nu, *opt.probes);
    require(cert <= opt.theta_bound * (1.0 + opt.certificate_slack) + 1e-14, ErrorCode::PreconditionFailed,
            "neumann: contraction certificate fails on probes (" + std::to_string(cert) + ")");
  }
  const Index K = neumann_terms(opt.theta_bound, opt.tol, opt.a_inv_norm);
  auto action = [a_inv, n, K](const Signal& f) {
    Signal u = a_inv(f);
    Signal acc = u;
    for (Index k = 0; k < K; ++k) {
      u = a_inv(n(u));
      acc += u;
    }
    return acc;
  };
  CausalOp::Action adj;
  if (a_inv.has_adjoint() && n.has_adjoint())
    adj = [a_inv, n, K](const Signal& g) {
      Signal acc = a_inv.apply_adjoint(g);
      Signal z = g;
      for (Index k = 0; k < K; ++k) {
        z = n.apply_adjoint(a_inv.apply_adjoint(z));
        acc += a_inv.apply_adjoint(z);
      }
      return acc;
    };
  OpFlags fl{a_inv.flags().claims_causal && n.flags().claims_causal,
             a_inv.flags().claims_translation_invariant && n.flags().claims_translation_invariant};
  return CausalOp(a_inv.dim_in(), a_inv.dim_out(), action, fl, adj, "neumann(" + a_inv.name() + ")");
}

namespace {

Signal block_forward_substitution(const CMatrix& a, const Signal& f) {
  const Index m = f.dim();
  const Index n = f.size();
  const double scale = a.cwiseAbs().maxCoeff();
  for (Index k = 0; k < n; ++k) {
    const Index rest = (n - k - 1) * m;
    if (rest > 0)
      require(a.block(k * m, (k + 1) * m, m, rest).cwiseAbs().maxCoeff() <= 1e-14 * scale,
              ErrorCode::PreconditionFailed, "invert_accretive: operator is not lower block triangular");
  }
  CVector rhs = f.flat();
  CVector u = CVector::Zero(rhs.size());
  for (Index k = 0; k < n; ++k) {
    CVector r = rhs.segment(k * m, m);
    if (k > 0) r -= a.block(k * m, 0, m, k * m) * u.head(k * m);
    Eigen::PartialPivLU<CMatrix> lu(a.block(k * m, k * m, m, m));
    u.segment(k * m, m) = lu.solve(r);
  }
  return Signal::from_flat(f.grid(), m, u);
}

// Restarted GMRES in the weighted inner product.
Signal gmres(const CausalOp& b, const Signal& f, double tol, Index restart = 60, Index max_restarts = 40) {
  const double nu = f.grid().nu;
  Signal x(f.grid(), f.dim());
  const double fn = norm_nu(f, nu);
  if (fn == 0.0) return x;
  for (Index cycle = 0; cycle < max_restarts; ++cycle) {
    Signal r = f - b(x);
    const double beta0 = norm_nu(r, nu);
    if (beta0 <= tol * fn) return x;
    std::vector<Signal> V{(1.0 / beta0) * r};
    CMatrix H = CMatrix::Zero(restart + 1, restart);
    Index used = 0;
    for (Index j = 0; j < restart; ++j) {
      Signal w = b(V[static_cast<size_t>(j)]);
      for (Index i = 0; i <= j; ++i) {
        H(i, j) = inner_nu(V[static_cast<size_t>(i)], w, nu);
        w.values() -= H(i, j) * V[static_cast<size_t>(i)].values();
      }
      H(j + 1, j) = norm_nu(w, nu);
      used = j + 1;
      if (std::abs(H(j + 1, j)) <= 1e-300) break;
      V.push_back((1.0 / H(j + 1, j).real()) * w);
    }
    CVector e1 = CVector::Zero(used + 1);
    e1[0] = beta0;
    const CVector y = H.topLeftCorner(used + 1, used).colPivHouseholderQr().solve(e1);
    for (Index i = 0; i < used; ++i) x.values() += y[i] * V[static_cast<size_t>(i)].values();
  }
  return x;
}

}  // namespace

Signal invert_accretive(const CausalOp& b, double c, const Signal& f, const AccretiveOptions& opt) {
  require(c > 0, ErrorCode::InvalidArgument, "invert_accretive: c must be positive");
  require(b.dim_in() == b.dim_out() && b.dim_in() == f.dim(), ErrorCode::DimMismatch, "invert_accretive: dims");
  const TimeGrid& g = f.grid();
  const double nu = g.nu;
  ProbeSet local;
  const ProbeSet* probes = opt.probes;
  if (!probes) {
    local = ProbeSet::smooth(g, f.dim(), 1234, 4, g.t0 + 0.5 * (g.t_end() - g.t0), g.t0);
    probes = &local;
  }
  for (Index i = 1; i <= opt.check_times; ++i) {
    const Index k = (g.n - 1) * i / (opt.check_times + 1);
    const double t = g.node(k);
    for (const auto& p : probes->probes()) {
      const Signal bp = b(p);
      const double lhs = inner_nu(truncate_before(bp, t), p, nu).real();
      const double qn = norm_nu(truncate_before(p, t), nu);
      require(lhs >= c * qn * qn * (1.0 - opt.norm_slack) - 1e-14 * std::pow(norm_nu(p, nu), 2),
              ErrorCode::PreconditionFailed, "invert_accretive: positivity spot check failed at t = " + std::to_string(t));
    }
  }
  Signal u;
  if (b.has_dense_for(g) || g.n * f.dim() <= 4096) {
    u = block_forward_substitution(to_dense(b, g), f);
  } else {
    u = gmres(b, f, 0.1 * opt.tol);
  }
  const double fn = norm_nu(f, nu);
  const double res = norm_nu(b(u) - f, nu);
  require(res <= opt.tol * std::max(fn, 1e-300), ErrorCode::Numerical,
          "invert_accretive: residual " + std::to_string(res / std::max(fn, 1e-300)) + " above tolerance");
  require(norm_nu(u, nu) <= fn / c * (1.0 + opt.norm_slack) + 1e-300, ErrorCode::Numerical,
          "invert_accretive: solution violates the 1/c bound");
  return u;
}

// ---------------------------------------------------------------------------
// Translation invariance and transfer functions

double translation_defect(const CausalOp& s, const TimeGrid& grid, Index steps) {
  const double h = -static_cast<double>(steps) * grid.dt;
  std::vector<Signal> tests;
  const Index k0 = grid.first_at_or_after(std::max(0.0, grid.t0));
  for (Index j = 0; j < s.dim_in(); ++j) {
    Signal p(grid, s.dim_in());
    p.values()(j, k0) = 1.0 / grid.dt;
    tests.push_back(p);
  }
  const double mid = grid.t0 + 0.5 * (grid.t_end() - grid.t0);
  const ProbeSet extra = ProbeSet::standard(grid, s.dim_in(), 99, 3, mid, std::max(grid.t0, 0.0));
  for (const auto& p : extra.probes()) tests.push_back(p);
  double worst = 0.0;
  for (const auto& p : tests) {
    const Signal lhs = s(shift(p, h));
    const Signal rhs = shift(s(p), h);
    worst = std::max(worst, norm_nu(lhs - rhs) / std::max(norm_nu(p), 1e-300));
  }
  return worst;
}

std::vector<CMatrix> transfer_function(const CausalOp& s, const std::vector<Complex>& z_samples, const TimeGrid& grid,
                                       double ti_threshold) {
  require(s.flags().claims_causal && s.flags().claims_translation_invariant, ErrorCode::PreconditionFailed,
          "transfer_function: operator does not claim causality and translation invariance");
  require(s.dim_in() == s.dim_out(), ErrorCode::DimMismatch, "transfer_function: square operator required");
  const Index k0 = grid.first_at_or_after(0.0);
  require(k0 < grid.n && std::abs(grid.node(k0)) <= 1e-9 * grid.dt, ErrorCode::InvalidArgument,
          "transfer_function: t = 0 must be a grid node");
  for (const Complex& z : z_samples)
    require(z.real() > grid.nu - 1e-12, ErrorCode::InvalidArgument, "transfer_function: need Re z > nu");
  const double defect = translation_defect(s, grid);
  require(defect <= ti_threshold, ErrorCode::PreconditionFailed,
          "transfer_function: shift-commutation defect " + std::to_string(defect) + " above threshold");
  const Index m = s.dim_in();
  std::vector<CMatrix> out(z_samples.size(), CMatrix::Zero(m, m));
  for (Index j = 0; j < m; ++j) {
    Signal p(grid, m);
    p.values()(j, k0) = 1.0 / grid.dt;
    const Signal r = s(p);
    for (size_t i = 0; i < z_samples.size(); ++i) {
      const Complex z = z_samples[i];
      CVector acc = CVector::Zero(m);
      for (Index k = 0; k < grid.n; ++k) acc += (grid.dt * std::exp(-z * grid.node(k))) * r.values().col(k);
      // The pulse transforms to exp(-z * 0) = 1.
      out[i].col(j) = acc;
    }
  }
  return out;
}

double nu_independence_defect(const std::function<CausalOp(double)>& builder, double nu1, double nu2,
                              const ProbeSet& probes) {
  require(nu2 > nu1 && nu1 > 0, ErrorCode::InvalidArgument, "nu_independence: need nu2 > nu1 > 0");
  const CausalOp s1 = builder(nu1);
  const CausalOp s2 = builder(nu2);
  double worst = 0.0;
  for (const auto& p : probes.probes()) {
    const Signal a = s1(p.with_nu(nu1));
    const Signal b = s2(p.with_nu(nu2));
    Signal d = a;
    d.values() -= b.values();
    worst = std::max(worst, norm_nu(d, 0.0) / std::max(norm_nu(p, 0.0), 1e-300));
  }
  return worst;
}

}  // namespace evo
