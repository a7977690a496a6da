// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <string>
#include <vector>

#include "evocalc/causal_op.hpp"
#include "evocalc/evo_solvers.hpp"

namespace evo {

using Profile = std::function<Complex(double)>;

/// max over probe pairs (phi, psi) of |<psi, (S_n - S_lim) phi>| / (||phi|| ||psi||).
/// When tests is null the probes double as test functions.
double weak_pairing_error(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes, double nu,
                          const ProbeSet* tests = nullptr);
/// max over probes of ||(S_n - S_lim) phi|| / ||phi||.
double strong_error(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes, double nu);

struct TopologyErrors {
  double weak = 0.0;
  double strong = 0.0;
  /// max(op_norm(S_n - S_lim), strong); op_norm may be a probe lower estimate.
  double norm = 0.0;
  bool norm_lower_estimate = true;
};
TopologyErrors topology_errors(const CausalOp& s_n, const CausalOp& s_lim, const ProbeSet& probes, double nu,
                               const ProbeSet* tests = nullptr);

/// A 1-periodic scalar profile with a scale ladder n (coefficient a(n t) or a(x / eps), eps = 1/n).
struct OscillatoryFamily {
  Profile base;
  std::vector<double> scales;

  /// max |a(y + 1) - a(y)| over sampled y in [0, 1].
  double periodicity_defect(Index samples = 257) const;
  Complex mean(Index samples = 4096) const;
  /// (int_0^1 1/a)^{-1}.
  Complex harmonic_mean(Index samples = 4096) const;
  /// inf Re a over sampled y.
  double min_real(Index samples = 4096) const;
};

/// Multiplication by a(n t) on dim-dimensional signals.
CausalOp oscillatory_multiplication(const Profile& a, double n, Index dim = 1);
/// a_1(n.) H a_2(n.) H ... H a_k(n.).
CausalOp product_operator(const std::vector<Profile>& a, double n);
/// H^{k-1} times the product of the means.
CausalOp product_limit(const std::vector<Profile>& a, Index samples = 4096);

struct ScaleRow {
  double scale = 0.0;
  TopologyErrors errors;
};
/// Weak/strong/norm errors of product_operator(a, n) against product_limit(a) over n.
std::vector<ScaleRow> product_mean_limit(const std::vector<Profile>& a, const std::vector<double>& scales,
                                         const ProbeSet& probes, double nu);

struct WeakLimitInputs {
  /// Weak limit of the inverses M_n^{-1} and its inverse.
  CausalOp O;
  CausalOp O_inv;
  /// P_1, P_2, ... (already truncated by the caller).
  std::vector<CausalOp> P;
  double c = 1.0;
  double theta = 0.5;
  /// Bound on ||O^{-1}||.
  double o_inv_norm = 1.0;
  double tol = 1e-10;
  /// Probes for the contraction certificate; skipped when null.
  const ProbeSet* probes = nullptr;
  /// Remark variant with time translation-invariant coefficients: P holds the tilde operators.
  bool commuting = false;
};

struct WeakLimitResult {
  CausalOp M_inf;
  /// Present in the commuting variant.
  std::optional<CausalOp> N_inf;
  Index terms = 0;
  /// Contraction bound of R used to pick the truncation.
  double q = 0.0;
  /// Probe value of ||sum P_k|| when probes were supplied.
  double certificate = 0.0;
};

/// M_inf = O^{-1} + O^{-1} sum_{l>=1} R^l with R = -sum_k P_k O^{-1}
/// (commuting variant: M_inf = O^{-1}, N_inf = O^{-1} sum_{l>=1} R^l).
WeakLimitResult ode_weak_limit_equation(const WeakLimitInputs& in);
/// Degraded accretivity constant (1 - c) c / (2 - c).
double degraded_constant(double c);

/// min over probes and sampled truncation times of Re<Q_t S phi, phi> / <Q_t phi, phi>.
double sampled_accretivity(const CausalOp& s, const ProbeSet& probes, double nu, Index times = 8);

/// Modified Bessel I_0 by its power series, stopped when a term drops below 1e-14 of the sum.
double bessel_i0(double z);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace evo
