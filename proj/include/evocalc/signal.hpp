// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "evocalc/error.hpp"

namespace evo {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseC = Eigen::SparseMatrix<Complex>;

/// Uniform time lattice t_k = t0 + k dt, k = 0..n-1, carrying the weight exponent nu.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.01;
  Index n = 2;
  double nu = 1.0;

  TimeGrid() = default;
  TimeGrid(double t0_, double dt_, Index n_, double nu_);

  /// Grid covering [t0, t_end] with step dt (t_end is rounded to the lattice).
  static TimeGrid window(double t0, double t_end, double dt, double nu);

  double node(Index k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return node(n - 1); }
  bool same_lattice(const TimeGrid& other) const;
  TimeGrid with_nu(double nu_) const;

  /// Smallest k with t_k >= t, clamped to [0, n].
  Index first_at_or_after(double t) const;
  /// h / dt as an integer; throws when h is not grid aligned.
  Index aligned_steps(double h) const;
  /// Trapezoid weight of node k times exp(-2 nu t_k) for the given exponent.
  double weight(Index k, double nu_) const;
  double weight(Index k) const { return weight(k, nu); }
  Eigen::VectorXd weights(double nu_) const;
};

/// Vector valued grid function; column k of values() is the value at node k.
class Signal {
 public:
  Signal() = default;
  Signal(const TimeGrid& grid, Index dim);
  Signal(const TimeGrid& grid, CMatrix values);

  static Signal from_function(const TimeGrid& grid, Index dim,
                              const std::function<CVector(double)>& f);
  static Signal scalar(const TimeGrid& grid, const std::function<Complex(double)>& f);
  /// Indicator of [a, b) times the constant vector `direction` (default e_0 for dim 1).
  static Signal indicator(const TimeGrid& grid, double a, double b, Index dim = 1,
                          std::optional<CVector> direction = std::nullopt);

  const TimeGrid& grid() const { return grid_; }
  Index dim() const { return values_.rows(); }
  Index size() const { return values_.cols(); }
  const CMatrix& values() const { return values_; }
  CMatrix& values() { return values_; }
  auto node(Index k) const { return values_.col(k); }

  /// Same values, retagged with another weight exponent.
  Signal with_nu(double nu) const;
  /// Index of the first node with a nonzero value (size() if the signal vanishes).
  Index support_start() const;
  /// Flattened node-major vector (entry k*dim + j).
  CVector flat() const;
  static Signal from_flat(const TimeGrid& grid, Index dim, const CVector& v);

  Signal& operator+=(const Signal& o);
  Signal& operator-=(const Signal& o);
  Signal& operator*=(Complex a);

 private:
  TimeGrid grid_;
  CMatrix values_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(Complex a, Signal s);

void check_compatible(const Signal& f, const Signal& g);

/// Trapezoid approximation of the weighted pairing, anti-linear in f.
Complex inner_nu(const Signal& f, const Signal& g);
Complex inner_nu(const Signal& f, const Signal& g, double nu);
double norm_nu(const Signal& f);
double norm_nu(const Signal& f, double nu);
/// Largest nodewise Euclidean norm.
double max_abs(const Signal& f);

/// Zeroes every node with t_k >= t.
Signal truncate_before(const Signal& f, double t);
/// (shift f)(t) = f(t + h); h must be a multiple of dt, values from outside are zero.
Signal shift(const Signal& f, double h);

enum class CoefficientKind { ConstantMatrix, TimeProfile, SpaceProfile, SpaceTimeProfile };

/// Pointwise (or spatially nonlocal) matrix coefficient acting nodewise on Signals.
class Coefficient {
 public:
  using BlockSampler = std::function<CMatrix(double t, Index cell)>;
  using OperatorSampler = std::function<SparseC(double t)>;

  Coefficient() = default;

  static Coefficient constant(const CMatrix& m);
  static Coefficient identity(Index dim, Complex scale = 1.0);
  static Coefficient time_profile(Index dim, std::function<CMatrix(double)> f);
  static Coefficient scalar_time(std::function<Complex(double)> f, Index dim = 1);
  static Coefficient space_profile(Index cells, Index block, std::function<CMatrix(Index)> f);
  static Coefficient scalar_space(Index cells, std::function<Complex(Index)> f);
  static Coefficient space_time_profile(Index cells, Index block, BlockSampler f);
  static Coefficient scalar_space_time(Index cells, std::function<Complex(double, Index)> f);
  /// Spatially nonlocal operator; time_dependent = false samples once at t = 0.
  static Coefficient operator_profile(Index dim, OperatorSampler f, bool time_dependent);
  static Coefficient block_diagonal(const std::vector<Coefficient>& parts);
  /// a + alpha * b, assembled as a nonlocal operator.
  static Coefficient combination(const Coefficient& a, Complex alpha, const Coefficient& b);
  static Coefficient zero(Index dim);

  Coefficient with_positivity(double c) const;
  Coefficient with_lipschitz(double l) const;
  Coefficient with_derivative(const Coefficient& d) const;

  CoefficientKind kind() const;
  Index dim() const { return dim_; }
  bool time_dependent() const;
  bool pointwise() const;
  std::optional<double> pos_const() const { return pos_const_; }
  std::optional<double> lip_const() const { return lip_const_; }
  const Coefficient* derivative() const { return derivative_.get(); }

  /// Block of a single-segment pointwise coefficient at (t, cell).
  CMatrix sample(double t, Index cell = 0) const;
  SparseC assemble(double t) const;
  void apply(double t, const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const;
  /// Nodewise inverse of a pointwise coefficient.
  Coefficient inverse() const;

  /// Sup over grid nodes (stride) and cells of the spectral norm of the sampled matrix.
  double sup_norm(const TimeGrid& grid, Index stride = 1) const;
  /// Smallest eigenvalue of the Hermitian part over the sampled nodes and cells.
  double min_real_part(const TimeGrid& grid, Index stride = 1) const;
  /// Sampled check Re<M xi, xi> >= c |xi|^2 against pos_const (or the given c).
  bool check_positivity(const TimeGrid& grid, std::optional<double> c = std::nullopt,
                        Index stride = 1, double slack = 1e-12) const;

 private:
  struct Segment {
    bool pointwise = true;
    Index block = 1;
    Index cells = 1;
    bool time_dep = false;
    bool space_dep = false;
    BlockSampler sampler;
    OperatorSampler op;
    std::shared_ptr<const SparseC> cached;
    Index dim() const { return block * cells; }
  };
  std::vector<Segment> segments_;
  Index dim_ = 0;
  std::optional<double> pos_const_;
  std::optional<double> lip_const_;
  std::shared_ptr<const Coefficient> derivative_;

  static Coefficient from_segment(Segment s);
};

/// Nodewise product c(t_k) f_k.
Signal multiply(const Coefficient& c, const Signal& f);

}  // namespace evo
