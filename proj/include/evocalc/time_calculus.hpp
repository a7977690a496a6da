// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <vector>

#include "evocalc/signal.hpp"

namespace evo {

/// Causal cumulative integral g_k = dt * sum_{j<=k} f_j.  Requires grid.nu > 0.
Signal antiderivative(const Signal& f);
/// Backward difference (f_k - f_{k-1}) / dt with f_{-1} = 0.
Signal derivative(const Signal& f);
/// Adjoints of the two maps above for the plain (unweighted, unit) nodewise pairing.
Signal antiderivative_adjoint(const Signal& f);
Signal derivative_adjoint(const Signal& f);

/// (1 + eps D)^{-1} f by the causal recursion g_k (1 + eps/dt) = f_k + (eps/dt) g_{k-1}.
Signal resolvent(const Signal& f, double eps);

/// Center and radius of the circle traced by the symbol of the discrete antiderivative.
struct SymbolCircle {
  double center = 0.0;
  double radius = 0.0;
};
SymbolCircle discrete_symbol_circle(double dt, double nu);

/// Resolvent via the geometric series in the antiderivative around the given center
/// (default: center of the discrete symbol circle).  terms receives the count used.
Signal resolvent_series(const Signal& f, double eps, double remainder_tol = 1e-8,
                        std::optional<double> center = std::nullopt, Index* terms = nullptr);

/// 1/(i xi + nu).
Complex h_nu(double xi, double nu);

/// Frequency samples of exp(-nu t) f on a zero-padded window.
struct SpectrumSignal {
  TimeGrid grid;
  Index dim = 1;
  Index padded = 0;
  int padding = 4;
  CMatrix values;  // dim x padded, column j at frequency xi_j
  double nu = 0.0;

  double frequency(Index j) const;
  double dxi() const;
  /// sqrt(dxi * sum |F_j|^2); equals the rectangle-rule weighted norm of the source.
  double norm() const;
};

SpectrumSignal fourier_laplace(const Signal& f, int padding = 4);
Signal inverse_fourier_laplace(const SpectrumSignal& F);

/// Material-law style multiplier z -> M(z), evaluated at z = h_nu(xi).
struct MultiplierFunction {
  Index dim = 1;
  std::function<CMatrix(Complex)> rule;
  double bound = 0.0;

  static MultiplierFunction scalar(std::function<Complex(Complex)> f, double bound);
};

Signal apply_multiplier(const MultiplierFunction& m, const Signal& f, int padding = 4);

struct SpectrumReport {
  double nu = 0.0;
  double center = 0.0;
  double radius = 0.0;
  std::vector<double> frequencies;
  std::vector<Complex> samples;
  double max_circle_deviation = 0.0;
  std::vector<Complex> dense_eigenvalues;
  SymbolCircle discrete_circle;
  double max_discrete_deviation = 0.0;
};

/// h_nu samples at xi_j = 2 pi j / (n dt), |j| <= kmax, plus the eigenvalues of the
/// dense lower-triangular antiderivative matrix (n <= 4096).
SpectrumReport spectrum_of_antiderivative(const TimeGrid& grid, Index kmax);

}  // namespace evo
