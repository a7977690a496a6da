// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include <cmath>
#include <numbers>

#include "evocalc/causal_op.hpp"

namespace evo {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  return {re, normal()};
}

double bump(double t, double center, double half_width) {
  const double s = (t - center) / half_width;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

CVector direction(Rng& rng, Index dim) {
  if (dim == 1) return CVector::Ones(1);
  CVector d(dim);
  for (Index j = 0; j < dim; ++j) d[j] = rng.complex_normal();
  return d / d.norm();
}

Signal make_probe(ProbeKind kind, Rng& rng, const TimeGrid& g, Index dim, double lo, double hi) {
  const double len = hi - lo;
  const CVector d = direction(rng, dim);
  switch (kind) {
    case ProbeKind::Indicator: {
      const double a = rng.uniform(lo, lo + 0.6 * len);
      const double b = std::min(hi, a + rng.uniform(0.1, 0.4) * len);
      return Signal::indicator(g, a, b, dim, d);
    }
    case ProbeKind::Bump: {
      const double w = rng.uniform(0.1, 0.25) * len;
      const double c = rng.uniform(lo + w, hi - w);
      return Signal::from_function(g, dim, [&](double t) -> CVector { return bump(t, c, w) * d; });
    }
    case ProbeKind::Smooth: {
      double amp[3], phase[3];
      for (int m = 0; m < 3; ++m) {
        amp[m] = rng.normal();
        phase[m] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      const double c = 0.5 * (lo + hi), w = 0.5 * len;
      return Signal::from_function(g, dim, [&](double t) -> CVector {
        double v = 0.0;
        for (int m = 0; m < 3; ++m) v += amp[m] * std::sin(2.0 * std::numbers::pi * (m + 1) * (t - lo) / len + phase[m]);
        return (bump(t, c, w) * v) * d;
      });
    }
  }
  return Signal(g, dim);
}

}  // namespace

ProbeSet ProbeSet::standard(const TimeGrid& grid, Index dim, std::uint64_t seed, Index count, double support_end,
                            double support_begin) {
  require(support_end > support_begin, ErrorCode::InvalidArgument, "probes: empty support window");
  ProbeSet p(grid, dim, seed);
  Rng rng(seed);
  const ProbeKind kinds[3] = {ProbeKind::Indicator, ProbeKind::Bump, ProbeKind::Smooth};
  for (Index i = 0; i < count; ++i) p.add(make_probe(kinds[i % 3], rng, grid, dim, support_begin, support_end));
  return p;
}

ProbeSet ProbeSet::smooth(const TimeGrid& grid, Index dim, std::uint64_t seed, Index count, double support_end,
                          double support_begin) {
  require(support_end > support_begin, ErrorCode::InvalidArgument, "probes: empty support window");
  ProbeSet p(grid, dim, seed);
  Rng rng(seed);
  for (Index i = 0; i < count; ++i)
    p.add(make_probe(i % 2 == 0 ? ProbeKind::Bump : ProbeKind::Smooth, rng, grid, dim, support_begin, support_end));
  return p;
}

ProbeSet ProbeSet::indicators(const TimeGrid& grid, Index dim, std::uint64_t seed,
                              const std::vector<std::pair<double, double>>& intervals) {
  ProbeSet p(grid, dim, seed);
  Rng rng(seed);
  for (const auto& [a, b] : intervals) p.add(Signal::indicator(grid, a, b, dim, direction(rng, dim)));
  return p;
}

void ProbeSet::add(Signal s) {
  require(s.grid().same_lattice(grid_), ErrorCode::GridMismatch, "probes: probe on another lattice");
  require(s.dim() == dim_, ErrorCode::DimMismatch, "probes: probe has another dim");
  probes_.push_back(std::move(s));
}

ProbeSet ProbeSet::with_nu(double nu) const {
  ProbeSet p = *this;
  p.grid_.nu = nu;
  for (auto& s : p.probes_) s = s.with_nu(nu);
  return p;
}

}  // namespace evo
