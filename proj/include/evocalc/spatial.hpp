// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include "evocalc/signal.hpp"

namespace evo {

enum class SpatialKind { SkewMatrix, GradDiv1D, GradDiv1DProjected };

/// Skew spatial block acting on one node of a Signal.
///
/// For the 1D kinds the interval (0, L) is split into m cells of width dx.  The
/// potential lives on the m - 1 interior nodes (zero boundary values), the flux on
/// the m cells, and the state is ordered [potential; flux].  grad0 is one-sided,
/// (grad0 u)_i = (u_i - u_{i-1}) / dx, and div = -grad0^T, so
/// A = [[0, div], [grad0, 0]] is skew by construction.
class SpatialOperator {
 public:
  SpatialOperator() = default;

  /// Bounded skew block; rejects matrices with ||A + A^H|| > 1e-12 ||A||.
  static SpatialOperator skew(const CMatrix& a);
  static SpatialOperator zero(Index dim);
  static SpatialOperator grad_div_1d(Index cells, double length = 1.0);
  /// Same block, plus the projection onto gradients (mean-zero flux vectors).
  static SpatialOperator grad_div_1d_projected(Index cells, double length = 1.0);

  SpatialKind kind() const { return kind_; }
  Index dim() const { return matrix_.rows(); }
  Index cells() const { return cells_; }
  double length() const { return length_; }
  double dx() const { return length_ / static_cast<double>(cells_); }
  Index potential_dim() const { return cells_ - 1; }
  Index flux_dim() const { return cells_; }

  const SparseC& matrix() const { return matrix_; }
  /// (m) x (m - 1) one-sided gradient with zero boundary values.
  SparseC grad0() const;
  /// (m - 1) x (m) divergence, the negative transpose of grad0.
  SparseC div() const;
  /// Orthogonal projection onto the range of grad0 (cell vectors with zero sum).
  CMatrix projection() const;
  /// Defects ||div pi - div|| and ||pi grad0 - grad0||.
  double projection_defect() const;

  /// ||A + A^H|| in the max-entry norm.
  double skew_defect() const;

 private:
  SpatialKind kind_ = SpatialKind::SkewMatrix;
  Index cells_ = 0;
  double length_ = 1.0;
  SparseC matrix_;
};

/// Harmonic and arithmetic means of cell samples.
double harmonic_mean(const std::vector<double>& samples);
double arithmetic_mean(const std::vector<double>& samples);

/// Node positions j dx (j = 1..m-1) and cell centers (i + 1/2) dx.
Eigen::VectorXd interior_nodes(Index cells, double length = 1.0);
Eigen::VectorXd cell_centers(Index cells, double length = 1.0);

/// Solves -div a grad0 u = f through the factorization
/// (pi grad0)^{-1} (pi a pi^*)^{-1} (-div pi^*)^{-1} f in O(m) operations.
/// a is a scalar space profile on the m cells; f lives on the m - 1 nodes.
CVector elliptic_solve(const Coefficient& a, const CVector& f, Index cells, double length = 1.0);
/// Direct tridiagonal solve of grad0^T a grad0 u = f, used as a cross-check.
CVector elliptic_solve_direct(const Coefficient& a, const CVector& f, Index cells, double length = 1.0);
/// The flux a grad0 u on the cells.
CVector elliptic_flux(const Coefficient& a, const CVector& u, Index cells, double length = 1.0);

}  // namespace evo
