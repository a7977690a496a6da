// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evocalc/signal.hpp"
#include "evocalc/time_calculus.hpp"

namespace evo {

/// Deterministic uniform generator (mt19937_64 with an explicit 53-bit mapping).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
};

enum class ProbeKind { Indicator, Bump, Smooth };

/// Seeded dictionary of compactly supported test signals.
class ProbeSet {
 public:
  ProbeSet() = default;
  ProbeSet(TimeGrid grid, Index dim, std::uint64_t seed) : grid_(grid), dim_(dim), seed_(seed) {}

  /// Cycles through indicators, bumps and smooth windowed modes on [support_begin, support_end].
  static ProbeSet standard(const TimeGrid& grid, Index dim, std::uint64_t seed, Index count,
                           double support_end, double support_begin = 0.0);
  /// Only C-infinity probes (bumps and windowed modes).
  static ProbeSet smooth(const TimeGrid& grid, Index dim, std::uint64_t seed, Index count,
                         double support_end, double support_begin = 0.0);
  /// Indicators of the given intervals, along random unit directions when dim > 1.
  static ProbeSet indicators(const TimeGrid& grid, Index dim, std::uint64_t seed,
                             const std::vector<std::pair<double, double>>& intervals);

  void add(Signal s);
  const std::vector<Signal>& probes() const { return probes_; }
  const Signal& operator[](size_t i) const { return probes_[i]; }
  size_t size() const { return probes_.size(); }
  const TimeGrid& grid() const { return grid_; }
  Index dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  ProbeSet with_nu(double nu) const;

 private:
  TimeGrid grid_;
  Index dim_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<Signal> probes_;
};

/// C-infinity bump exp(1 - 1/(1 - s^2)) on (center - half_width, center + half_width).
double bump(double t, double center, double half_width);

struct OpFlags {
  bool claims_causal = true;
  bool claims_translation_invariant = false;
};

/// Dense (n dim_out) x (n dim_in) matrix in node-major ordering, tied to a lattice.
struct DenseMatrix {
  TimeGrid lattice;
  CMatrix matrix;
};

/// Linear operator on Signals.  The adjoint, when present, is taken with respect to
/// the plain nodewise pairing sum_k <x_k, y_k>.
class CausalOp {
 public:
  using Action = std::function<Signal(const Signal&)>;

  CausalOp() = default;
  CausalOp(Index dim_in, Index dim_out, Action action, OpFlags flags = {}, Action adjoint = {},
           std::string name = "op");

  Signal operator()(const Signal& f) const;
  Signal apply_adjoint(const Signal& g) const;
  bool has_adjoint() const { return static_cast<bool>(adjoint_); }
  const std::optional<DenseMatrix>& dense() const { return dense_; }
  bool has_dense_for(const TimeGrid& g) const;

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const OpFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }

  CausalOp with_dense(DenseMatrix d) const;
  CausalOp with_name(std::string name) const;
  CausalOp with_flags(OpFlags f) const;

 private:
  Index dim_in_ = 1;
  Index dim_out_ = 1;
  Action action_;
  Action adjoint_;
  OpFlags flags_;
  std::string name_ = "op";
  std::optional<DenseMatrix> dense_;
};

// Factories.
CausalOp identity_op(Index dim);
CausalOp zero_op(Index dim_in, Index dim_out);
CausalOp scale_op(const CausalOp& s, Complex alpha);
CausalOp antiderivative_op(Index dim);
CausalOp derivative_op(Index dim);
CausalOp shift_op(double h, Index dim);
CausalOp multiply_op(const Coefficient& c);
CausalOp multiplier_op(const MultiplierFunction& m, int padding = 4);
CausalOp resolvent_op(double eps, Index dim);

/// S o T.
CausalOp compose(const CausalOp& s, const CausalOp& t);
/// S + alpha T.
CausalOp add(const CausalOp& s, const CausalOp& t, Complex alpha = 1.0);

/// Materializes S on a grid by applying it to unit vectors.
CMatrix to_dense(const CausalOp& s, const TimeGrid& grid);
CausalOp materialize(const CausalOp& s, const TimeGrid& grid);

enum class NormMethod { Dense, PowerIteration, ProbeSup };

struct NormEstimate {
  double value = 0.0;
  NormMethod method = NormMethod::ProbeSup;
  int iterations = 0;
  bool converged = false;
  /// True when value is only a lower estimate (probe sup or unconverged iteration).
  bool lower_estimate = false;
};

/// Operator norm for the nu-weighted trapezoid inner product.
NormEstimate op_norm(const CausalOp& s, double nu, const ProbeSet& probes);
/// Largest singular value of a dense node-major matrix under the weighted inner products.
NormEstimate dense_weighted_norm(const CMatrix& a, const TimeGrid& grid, Index dim_in, Index dim_out, double nu);
/// max over probes of ||S f|| / ||f||.
double probe_sup(const CausalOp& s, double nu, const ProbeSet& probes);

double causality_defect(const CausalOp& s, double t, const ProbeSet& probes, double nu);
/// Defect at every grid node where it can be nonzero for the probe set (max over t).
double max_causality_defect(const CausalOp& s, const ProbeSet& probes, double nu, Index stride = 1);
double strong_causality_constant(const CausalOp& s, double t, const ProbeSet& probes, double nu);

struct NeumannOptions {
  double theta_bound = 0.5;
  double tol = 1e-10;
  /// Bound on ||A_inv|| used in the a-priori remainder.
  double a_inv_norm = 1.0;
  /// When set, the contraction certificate is re-checked on these probes.
  const ProbeSet* probes = nullptr;
  double certificate_slack = 0.02;
};

/// Number of terms K with theta^{K+1}/(1-theta) * a_inv_norm <= tol.
Index neumann_terms(double theta, double tol, double a_inv_norm);
/// sum_{k <= K} (A_inv N)^k A_inv, an inverse of (A - N).
CausalOp neumann_inverse(const CausalOp& a_inv, const CausalOp& n, const NeumannOptions& opt);

struct AccretiveOptions {
  double tol = 1e-10;
  double norm_slack = 0.02;
  /// Probes for the positivity spot check; when null a default set is generated.
  const ProbeSet* probes = nullptr;
  /// Number of truncation times sampled in the positivity check.
  Index check_times = 8;
};

/// Solves B u = f for an accretive causal B (Re<Q_t B phi, phi> >= c <Q_t phi, phi>).
Signal invert_accretive(const CausalOp& b, double c, const Signal& f, const AccretiveOptions& opt = {});

/// Shift-commutation defect max ||S(tau_h p) - tau_h(S p)|| / ||p|| over pulses and probes.
double translation_defect(const CausalOp& s, const TimeGrid& grid, Index steps = 7);
/// M(z) from responses to unit pulses at t = 0.
std::vector<CMatrix> transfer_function(const CausalOp& s, const std::vector<Complex>& z_samples,
                                       const TimeGrid& grid, double ti_threshold = 1e-8);

/// max over probes of the unweighted discrepancy ||S(nu1) f - S(nu2) f||_0 / ||f||_0.
double nu_independence_defect(const std::function<CausalOp(double)>& builder, double nu1, double nu2,
                              const ProbeSet& probes);

}  // namespace evo
