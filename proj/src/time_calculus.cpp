// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/time_calculus.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace evo {

Signal antiderivative(const Signal& f) {
  require(f.grid().nu > 0, ErrorCode::PreconditionFailed, "antiderivative: needs nu > 0");
  Signal g(f.grid(), f.dim());
  const double dt = f.grid().dt;
  CVector acc = CVector::Zero(f.dim());
  for (Index k = 0; k < f.size(); ++k) {
    acc += f.values().col(k);
    g.values().col(k) = dt * acc;
  }
  return g;
}

Signal derivative(const Signal& f) {
  Signal g(f.grid(), f.dim());
  const double inv = 1.0 / f.grid().dt;
  if (f.size() > 0) g.values().col(0) = inv * f.values().col(0);
  for (Index k = 1; k < f.size(); ++k) g.values().col(k) = inv * (f.values().col(k) - f.values().col(k - 1));
  return g;
}

Signal antiderivative_adjoint(const Signal& f) {
  Signal g(f.grid(), f.dim());
  const double dt = f.grid().dt;
  CVector acc = CVector::Zero(f.dim());
  for (Index k = f.size() - 1; k >= 0; --k) {
    acc += f.values().col(k);
    g.values().col(k) = dt * acc;
  }
  return g;
}

Signal derivative_adjoint(const Signal& f) {
  Signal g(f.grid(), f.dim());
  const double inv = 1.0 / f.grid().dt;
  const Index n = f.size();
  for (Index k = 0; k + 1 < n; ++k) g.values().col(k) = inv * (f.values().col(k) - f.values().col(k + 1));
  g.values().col(n - 1) = inv * f.values().col(n - 1);
  return g;
}

Signal resolvent(const Signal& f, double eps) {
  require(eps > 0, ErrorCode::InvalidArgument, "resolvent: eps must be positive");
  require(f.grid().nu > 0, ErrorCode::PreconditionFailed, "resolvent: needs nu > 0");
  const double a = eps / f.grid().dt;
  const double inv = 1.0 / (1.0 + a);
  Signal g(f.grid(), f.dim());
  CVector prev = CVector::Zero(f.dim());
  for (Index k = 0; k < f.size(); ++k) {
    prev = inv * (f.values().col(k) + a * prev);
    g.values().col(k) = prev;
  }
  return g;
}

SymbolCircle discrete_symbol_circle(double dt, double nu) {
  const double rho = std::exp(-nu * dt);
  const double den = 1.0 - rho * rho;
  return {dt / den, dt * rho / den};
}

Signal resolvent_series(const Signal& f, double eps, double remainder_tol, std::optional<double> center,
                        Index* terms) {
  require(eps > 0, ErrorCode::InvalidArgument, "resolvent_series: eps must be positive");
  require(remainder_tol > 0, ErrorCode::InvalidArgument, "resolvent_series: tolerance must be positive");
  const SymbolCircle circ = discrete_symbol_circle(f.grid().dt, f.grid().nu);
  const double r = center ? *center : circ.center;
  require(r > 0, ErrorCode::InvalidArgument, "resolvent_series: center must be positive");
  const double q = (std::abs(r - circ.center) + circ.radius) / (eps + r);
  require(q < 1.0, ErrorCode::PreconditionFailed, "resolvent_series: series does not contract for this center");
  Index K = 0;
  if (q > 0) K = std::max<Index>(0, static_cast<Index>(std::ceil(std::log(remainder_tol * (1.0 - q)) / std::log(q))) - 1);
  if (terms) *terms = K + 1;
  const double scale = 1.0 / (eps + r);
  Signal y = f;
  Signal acc = f;
  for (Index k = 1; k <= K; ++k) {
    Signal hy = antiderivative(y);
    y.values() = scale * (r * y.values() - hy.values());
    acc += y;
  }
  Signal out = antiderivative(acc);
  out *= scale;
  return out;
}

Complex h_nu(double xi, double nu) { return 1.0 / Complex(nu, xi); }

namespace {

Index smooth_size(Index n) {
  for (Index m = n;; ++m) {
    Index r = m;
    for (Index p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace

double SpectrumSignal::dxi() const { return 2.0 * std::numbers::pi / (static_cast<double>(padded) * grid.dt); }

double SpectrumSignal::frequency(Index j) const {
  const Index jj = (j <= padded / 2) ? j : j - padded;
  return static_cast<double>(jj) * dxi();
}

double SpectrumSignal::norm() const { return std::sqrt(dxi() * values.squaredNorm()); }

SpectrumSignal fourier_laplace(const Signal& f, int padding) {
  require(padding >= 1, ErrorCode::InvalidArgument, "fourier_laplace: padding must be >= 1");
  const TimeGrid& g = f.grid();
  SpectrumSignal F;
  F.grid = g;
  F.dim = f.dim();
  F.padding = padding;
  F.nu = g.nu;
  F.padded = smooth_size(static_cast<Index>(padding) * g.n);
  F.values = CMatrix::Zero(f.dim(), F.padded);
  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<size_t>(F.padded)), out;
  const double c = g.dt / std::sqrt(2.0 * std::numbers::pi);
  for (Index d = 0; d < f.dim(); ++d) {
    std::fill(in.begin(), in.end(), Complex(0.0));
    for (Index k = 0; k < g.n; ++k) in[static_cast<size_t>(k)] = std::exp(-g.nu * g.node(k)) * f.values()(d, k);
    fft.fwd(out, in);
    for (Index j = 0; j < F.padded; ++j)
      F.values(d, j) = c * std::exp(Complex(0.0, -F.frequency(j) * g.t0)) * out[static_cast<size_t>(j)];
  }
  return F;
}

Signal inverse_fourier_laplace(const SpectrumSignal& F) {
  const TimeGrid& g = F.grid;
  Signal f(g, F.dim);
  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<size_t>(F.padded)), out;
  const double c = std::sqrt(2.0 * std::numbers::pi) / g.dt;
  for (Index d = 0; d < F.dim; ++d) {
    for (Index j = 0; j < F.padded; ++j)
      in[static_cast<size_t>(j)] = c * std::exp(Complex(0.0, F.frequency(j) * g.t0)) * F.values(d, j);
    fft.inv(out, in);
    for (Index k = 0; k < g.n; ++k) f.values()(d, k) = std::exp(F.nu * g.node(k)) * out[static_cast<size_t>(k)];
  }
  return f;
}

MultiplierFunction MultiplierFunction::scalar(std::function<Complex(Complex)> f, double bound) {
  MultiplierFunction m;
  m.dim = 1;
  m.bound = bound;
  m.rule = [f = std::move(f)](Complex z) {
    CMatrix v(1, 1);
    v(0, 0) = f(z);
    return v;
  };
  return m;
}

Signal apply_multiplier(const MultiplierFunction& m, const Signal& f, int padding) {
  require(m.dim == f.dim(), ErrorCode::DimMismatch, "apply_multiplier: dims differ");
  require(m.bound >= 0 && std::isfinite(m.bound), ErrorCode::InvalidArgument, "apply_multiplier: bad bound");
  SpectrumSignal F = fourier_laplace(f, padding);
  for (Index j = 0; j < F.padded; ++j) {
    const CMatrix M = m.rule(h_nu(F.frequency(j), F.nu));
    require(M.rows() == m.dim && M.cols() == m.dim, ErrorCode::DimMismatch, "apply_multiplier: rule size");
    require(M.allFinite(), ErrorCode::PreconditionFailed, "apply_multiplier: unbounded (non-finite) sample");
    const double nrm = (M.size() == 1) ? std::abs(M(0, 0)) : Eigen::JacobiSVD<CMatrix>(M).singularValues()[0];
    require(nrm <= m.bound * (1.0 + 1e-9) + 1e-300, ErrorCode::PreconditionFailed,
            "apply_multiplier: sample exceeds the declared bound");
    F.values.col(j) = M * F.values.col(j);
  }
  return inverse_fourier_laplace(F);
}

SpectrumReport spectrum_of_antiderivative(const TimeGrid& grid, Index kmax) {
  require(grid.nu > 0, ErrorCode::PreconditionFailed, "spectrum: needs nu > 0");
  require(grid.n <= 4096, ErrorCode::InvalidArgument, "spectrum: grid too large to materialize (n > 4096)");
  require(kmax >= 0, ErrorCode::InvalidArgument, "spectrum: kmax must be non-negative");
  SpectrumReport rep;
  rep.nu = grid.nu;
  rep.center = rep.radius = 1.0 / (2.0 * grid.nu);
  rep.discrete_circle = discrete_symbol_circle(grid.dt, grid.nu);
  const double period = static_cast<double>(grid.n) * grid.dt;
  const double rho = std::exp(-grid.nu * grid.dt);
  for (Index j = -kmax; j <= kmax; ++j) {
    const double xi = 2.0 * std::numbers::pi * static_cast<double>(j) / period;
    const Complex z = h_nu(xi, grid.nu);
    rep.frequencies.push_back(xi);
    rep.samples.push_back(z);
    rep.max_circle_deviation = std::max(rep.max_circle_deviation, std::abs(std::abs(z - rep.center) - rep.radius));
    const Complex s = grid.dt / (1.0 - rho * std::exp(Complex(0.0, -xi * grid.dt)));
    rep.max_discrete_deviation =
        std::max(rep.max_discrete_deviation,
                 std::abs(std::abs(s - rep.discrete_circle.center) - rep.discrete_circle.radius));
  }
  // Diagonal of the materialized matrix: response at node k to a unit value at node k.
  rep.dense_eigenvalues.reserve(static_cast<size_t>(grid.n));
  Signal e(grid, 1);
  for (Index k = 0; k < grid.n; ++k) {
    e.values().setZero();
    e.values()(0, k) = 1.0;
    rep.dense_eigenvalues.push_back(antiderivative(e).values()(0, k));
  }
  return rep;
}

}  // namespace evo
