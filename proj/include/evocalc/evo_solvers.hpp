// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include "evocalc/causal_op.hpp"
#include "evocalc/signal.hpp"
#include "evocalc/spatial.hpp"

namespace evo {

/// (d/dt diag(M, 0) + N) U = F with U = (U0, U1), U0 of size m0 and U1 of size m1.
/// N is a single (m0 + m1) coefficient read blockwise.
struct OdeBlockSystem {
  Coefficient M;
  Coefficient N;
  Index m0 = 1;
  Index m1 = 0;
  double c = 1.0;

  static OdeBlockSystem from_blocks(const CMatrix& m, const CMatrix& n00, const CMatrix& n01, const CMatrix& n10,
                                    const CMatrix& n11, double c);
};

struct OdeBlockNorms {
  double n00 = 0.0, n01 = 0.0, n10 = 0.0, n11 = 0.0;
};

struct OdeSolveInfo {
  double theta = 0.0;
  /// Effective weight (1 - exp(-nu dt)) / dt used in theta.
  double nu_eff = 0.0;
  Index neumann_terms = 0;
  double route_discrepancy = 0.0;
  OdeBlockNorms norms;
};

/// Sampled sup norms of the four blocks of N.
OdeBlockNorms ode_block_norms(const OdeBlockSystem& sys, const TimeGrid& grid, Index stride = 1);
/// (c ||N00|| + ||N01|| ||N10||) / (nu c^2).
double ode_theta(const OdeBlockNorms& n, double c, double nu);
/// Right side of the residual estimate for B^{-1} diag(d/dt, 1) with c0 = c1 = c.
double ode_residual_bound(const OdeBlockNorms& n, double c, double nu);

/// Solves by the block Neumann series and by causal time stepping, requires agreement <= tol,
/// returns the time-stepping result.
Signal solve_ode_block(const OdeBlockSystem& sys, const Signal& F, double nu, double tol = 1e-8,
                       OdeSolveInfo* info = nullptr);
/// Time-stepping route only.
Signal ode_time_step(const OdeBlockSystem& sys, const Signal& F);
/// Neumann route only; terms receives the truncation index.
Signal ode_neumann(const OdeBlockSystem& sys, const Signal& F, double theta, double tol, Index* terms = nullptr);
/// Solution map as a CausalOp; the grid chooses the weight.
CausalOp ode_solution_op(const OdeBlockSystem& sys, double tol = 1e-8);

struct PicardInfo {
  double nu = 0.0;
  double kappa = 0.0;
  int iterations = 0;
  double last_gap = 0.0;
  double residual = 0.0;
};

/// Fixed point of u = H(F(u) + f) with weight nu = 2 lip.  F acts nodewise and F(0) = 0.
Signal picard_solve(const std::function<CVector(const CVector&)>& F, double lip, const Signal& f, double tol = 1e-10,
                    PicardInfo* info = nullptr, int max_iterations = 20000);

/// (d/dt M + N + A) u = f.  Mprime is required when M depends on time.
struct PdeSystem {
  Coefficient M;
  std::optional<Coefficient> Mprime;
  Coefficient N;
  SpatialOperator A;
  double c = 1.0;
};

struct PdeOptions {
  double tol = 1e-10;
  bool check_positivity = true;
  bool check_norm = true;
  bool check_causality = true;
  double norm_slack = 0.05;
  /// Node stride for the positivity samples.
  Index positivity_stride = 16;
};

struct PdeSolveInfo {
  double min_positivity = 0.0;
  double norm_ratio = 0.0;
  double causality = 0.0;
};

/// Smallest eigenvalue of Re(nu M + M'/2) + Re N over sampled nodes.
double pde_positivity(const PdeSystem& sys, const TimeGrid& grid, double nu, Index stride = 16);
Signal solve_evo_pde(const PdeSystem& sys, const Signal& f, double nu, const PdeOptions& opt = {},
                     PdeSolveInfo* info = nullptr);
CausalOp pde_solution_op(const PdeSystem& sys, PdeOptions opt = {});
/// Applies d/dt M + N + A (the discrete inverse of the solution map).
Signal apply_evo_pde(const PdeSystem& sys, const Signal& u);

/// Discrete commutator [D, m] g, with value (m(t_k) - m(t_{k-1})) / dt g_{k-1}.
Signal discrete_commutator(const Coefficient& m, const Signal& g);

/// Relative discrepancy of the two sides of the fundamental identity on f.
double funid_residual(const PdeSystem& mn, const PdeSystem& op, const Signal& f);

struct NormEstimateCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// max over probes of lhs(phi) / rhs(phi).
  double worst_ratio = 0.0;
  bool holds = false;
};

/// Probe check of ||(sol(M,N) sol(O,P)^{-1} - 1) H sol(O,P)|| against
/// (1/c)(||(M-O) sol|| + ||[D, M-O] H sol|| + ||(N-P) H sol||).
NormEstimateCheck cdpden_check(const PdeSystem& mn, const PdeSystem& op, const ProbeSet& probes, double slack = 0.05);

/// 1D Maxwell system: E on the m-1 nodes, H on the m cells.
struct Maxwell1D {
  Coefficient eps;    // m - 1
  Coefficient mu;     // m
  Coefficient sigma;  // m - 1
  Index cells = 0;
  double length = 1.0;
  double c = 1.0;
};

PdeSystem maxwell_system(const Maxwell1D& m);
/// Checks eta eps + eps'/2 >= 0 at sampled nodes for the given eta values.
bool maxwell_premise(const Maxwell1D& m, const TimeGrid& grid, const std::vector<double>& etas, Index stride = 16);
/// Solves and returns (E, H); J lives on the m - 1 nodes.
Signal maxwell_1d_solve(const Maxwell1D& m, const Signal& J, double nu, const PdeOptions& opt = {});

/// 1D heat system on (0, L): M = diag(1, 0), N = diag(0, a^{-1}), A = grad0/div pair.
/// a is a scalar space profile on the m cells; c is the positivity constant.
PdeSystem heat_system(const Coefficient& a, Index cells, double length, double c);

/// First-order 1D wave system with blocks (1, (pi a pi^*)^{-1}) and the projected skew pair.
/// The generic form adds the constant-mode projector to make the flux block invertible;
/// for mean-free flux data the flux stays in the range of pi.
PdeSystem wave_system(const Coefficient& a, Index cells, double length, double nu);
/// Same system by the tridiagonal recursion
///   (1 + dt^2 grad0^T a grad0) v_k = v_{k-1} + dt f_k + dt grad0^T p_{k-1} + dt^2 grad0^T a pi g_k,
///   p_k = p_{k-1} + dt pi a (pi g_k - grad0 v_k),
/// for data (f, g); a must be time independent.
Signal wave_1d_solve(const Coefficient& a, Index cells, double length, const Signal& data);

}  // namespace evo
