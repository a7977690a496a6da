// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/spatial.hpp"

#include <numeric>

#include <Eigen/SparseLU>

namespace evo {

namespace {

SparseC build_grad0(Index m, double dx) {
  std::vector<Eigen::Triplet<Complex>> trip;
  for (Index i = 0; i < m; ++i) {
    // cell i sits between node i (left) and node i+1 (right); interior nodes are 1..m-1 -> columns 0..m-2.
    if (i >= 1) trip.emplace_back(i, i - 1, -1.0 / dx);
    if (i <= m - 2) trip.emplace_back(i, i, 1.0 / dx);
  }
  SparseC g(m, m - 1);
  g.setFromTriplets(trip.begin(), trip.end());
  return g;
}

double max_entry(const SparseC& m) {
  double v = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

std::vector<Complex> cell_samples(const Coefficient& a, Index cells) {
  require(a.dim() == cells, ErrorCode::DimMismatch, "elliptic: coefficient must have one entry per cell");
  const SparseC m = a.assemble(0.0);
  std::vector<Complex> out(static_cast<size_t>(cells), 0.0);
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) {
      require(it.row() == it.col(), ErrorCode::InvalidArgument, "elliptic: coefficient must be diagonal");
      out[static_cast<size_t>(it.row())] = it.value();
    }
  for (const Complex& v : out) require(v.real() > 0, ErrorCode::PreconditionFailed, "elliptic: needs Re a > 0 on every cell");
  return out;
}

}  // namespace

SpatialOperator SpatialOperator::skew(const CMatrix& a) {
  require(a.rows() == a.cols(), ErrorCode::DimMismatch, "spatial: skew block must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  require((a + a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorCode::PreconditionFailed,
          "spatial: matrix is not skew");
  SpatialOperator s;
  s.kind_ = SpatialKind::SkewMatrix;
  s.matrix_ = a.sparseView();
  return s;
}

SpatialOperator SpatialOperator::zero(Index dim) {
  SpatialOperator s;
  s.matrix_ = SparseC(dim, dim);
  return s;
}

SpatialOperator SpatialOperator::grad_div_1d(Index cells, double length) {
  require(cells >= 2, ErrorCode::InvalidArgument, "spatial: need at least two cells");
  require(length > 0, ErrorCode::InvalidArgument, "spatial: length must be positive");
  SpatialOperator s;
  s.kind_ = SpatialKind::GradDiv1D;
  s.cells_ = cells;
  s.length_ = length;
  const SparseC g = build_grad0(cells, s.dx());
  const SparseC d = -SparseC(g.adjoint());
  const Index p = cells - 1;
  std::vector<Eigen::Triplet<Complex>> trip;
  for (Index k = 0; k < d.outerSize(); ++k)
    for (SparseC::InnerIterator it(d, k); it; ++it) trip.emplace_back(it.row(), p + it.col(), it.value());
  for (Index k = 0; k < g.outerSize(); ++k)
    for (SparseC::InnerIterator it(g, k); it; ++it) trip.emplace_back(p + it.row(), it.col(), it.value());
  s.matrix_ = SparseC(p + cells, p + cells);
  s.matrix_.setFromTriplets(trip.begin(), trip.end());
  return s;
}

SpatialOperator SpatialOperator::grad_div_1d_projected(Index cells, double length) {
  SpatialOperator s = grad_div_1d(cells, length);
  s.kind_ = SpatialKind::GradDiv1DProjected;
  return s;
}

SparseC SpatialOperator::grad0() const {
  require(kind_ != SpatialKind::SkewMatrix, ErrorCode::InvalidArgument, "spatial: no grad0 for a skew block");
  return build_grad0(cells_, dx());
}

SparseC SpatialOperator::div() const { return -SparseC(grad0().adjoint()); }

CMatrix SpatialOperator::projection() const {
  require(kind_ != SpatialKind::SkewMatrix, ErrorCode::InvalidArgument, "spatial: no projection for a skew block");
  const double m = static_cast<double>(cells_);
  return CMatrix::Identity(cells_, cells_) - CMatrix::Constant(cells_, cells_, 1.0 / m);
}

double SpatialOperator::projection_defect() const {
  const CMatrix pi = projection();
  const CMatrix d = CMatrix(div());
  const CMatrix g = CMatrix(grad0());
  return std::max((d * pi - d).cwiseAbs().maxCoeff(), (pi * g - g).cwiseAbs().maxCoeff());
}

double SpatialOperator::skew_defect() const {
  if (matrix_.nonZeros() == 0) return 0.0;
  const SparseC s = matrix_ + SparseC(matrix_.adjoint());
  return max_entry(s);
}

double harmonic_mean(const std::vector<double>& samples) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "harmonic_mean: no samples");
  double acc = 0.0;
  for (double v : samples) {
    require(v > 0, ErrorCode::InvalidArgument, "harmonic_mean: samples must be positive");
    acc += 1.0 / v;
  }
  return static_cast<double>(samples.size()) / acc;
}

double arithmetic_mean(const std::vector<double>& samples) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "arithmetic_mean: no samples");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

Eigen::VectorXd interior_nodes(Index cells, double length) {
  const double dx = length / static_cast<double>(cells);
  Eigen::VectorXd x(cells - 1);
  for (Index j = 0; j < cells - 1; ++j) x[j] = static_cast<double>(j + 1) * dx;
  return x;
}

Eigen::VectorXd cell_centers(Index cells, double length) {
  const double dx = length / static_cast<double>(cells);
  Eigen::VectorXd x(cells);
  for (Index i = 0; i < cells; ++i) x[i] = (static_cast<double>(i) + 0.5) * dx;
  return x;
}

CVector elliptic_solve(const Coefficient& a, const CVector& f, Index cells, double length) {
  require(cells >= 2 && f.size() == cells - 1, ErrorCode::DimMismatch, "elliptic: f must live on the m-1 nodes");
  const std::vector<Complex> av = cell_samples(a, cells);
  const double dx = length / static_cast<double>(cells);
  // (-div pi^*)^{-1}: grad0^T q = f reads (q_i - q_{i+1}) / dx = f_i; pick the zero-mean solution.
  CVector q(cells);
  q[0] = 0.0;
  for (Index i = 0; i + 1 < cells; ++i) q[i + 1] = q[i] - dx * f[i];
  q.array() -= q.mean();
  // (pi a pi^*)^{-1}: w = a^{-1}(q + lambda) with zero mean.
  Complex s_qa = 0.0, s_a = 0.0;
  for (Index i = 0; i < cells; ++i) {
    s_qa += q[i] / av[static_cast<size_t>(i)];
    s_a += 1.0 / av[static_cast<size_t>(i)];
  }
  const Complex lambda = -s_qa / s_a;
  CVector w(cells);
  for (Index i = 0; i < cells; ++i) w[i] = (q[i] + lambda) / av[static_cast<size_t>(i)];
  // (pi grad0)^{-1}: cumulative sum from the left boundary.
  CVector u(cells - 1);
  Complex acc = 0.0;
  for (Index j = 0; j < cells - 1; ++j) {
    acc += dx * w[j];
    u[j] = acc;
  }
  return u;
}

CVector elliptic_solve_direct(const Coefficient& a, const CVector& f, Index cells, double length) {
  require(cells >= 2 && f.size() == cells - 1, ErrorCode::DimMismatch, "elliptic: f must live on the m-1 nodes");
  const std::vector<Complex> av = cell_samples(a, cells);
  const SparseC g = build_grad0(cells, length / static_cast<double>(cells));
  SparseC da(cells, cells);
  std::vector<Eigen::Triplet<Complex>> trip;
  for (Index i = 0; i < cells; ++i) trip.emplace_back(i, i, av[static_cast<size_t>(i)]);
  da.setFromTriplets(trip.begin(), trip.end());
  SparseC k = SparseC(g.transpose()) * da * g;
  k.makeCompressed();
  Eigen::SparseLU<SparseC> lu;
  lu.compute(k);
  require(lu.info() == Eigen::Success, ErrorCode::Numerical, "elliptic: direct factorization failed");
  return lu.solve(f);
}

CVector elliptic_flux(const Coefficient& a, const CVector& u, Index cells, double length) {
  const std::vector<Complex> av = cell_samples(a, cells);
  CVector q = build_grad0(cells, length / static_cast<double>(cells)) * u;
  for (Index i = 0; i < cells; ++i) q[i] *= av[static_cast<size_t>(i)];
  return q;
}

}  // namespace evo
