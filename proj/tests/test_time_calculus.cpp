// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "evocalc/causal_op.hpp"
#include "evocalc/time_calculus.hpp"

using namespace evo;

namespace {

Signal random_signal(const TimeGrid& g, Index dim, Rng& rng) {
  Signal f(g, dim);
  for (Index k = 0; k < g.n; ++k)
    for (Index i = 0; i < dim; ++i) f.values()(i, k) = rng.complex_normal();
  return f;
}

}  // namespace

TEST_CASE("derivative and antiderivative are mutually inverse") {
  const TimeGrid g = TimeGrid::window(0.0, 3.0, 0.01, 1.0);
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Signal f = random_signal(g, 2, rng);
    CHECK(norm_nu(derivative(antiderivative(f)) - f) <= 1e-12 * norm_nu(f));
    CHECK(norm_nu(antiderivative(derivative(f)) - f) <= 1e-12 * norm_nu(f));
  }
}

TEST_CASE("antiderivative of cos approaches sin at first order") {
  // Independent oracle: int_0^t cos = sin t; the rectangle rule is off by O(dt).
  double prev = 0.0;
  for (double dt : {0.01, 0.005, 0.0025}) {
    const TimeGrid g = TimeGrid::window(0.0, 6.0, dt, 1.0);
    const Signal f = Signal::scalar(g, [](double t) { return Complex(std::cos(t)); });
    const Signal h = antiderivative(f);
    double err = 0.0;
    for (Index k = 0; k < g.n; ++k) err = std::max(err, std::abs(h.values()(0, k) - std::sin(g.node(k))));
    CHECK(err <= dt);
    if (prev > 0) CHECK(err / prev == doctest::Approx(0.5).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("adjoints satisfy the unweighted pairing identity") {
  const TimeGrid g = TimeGrid::window(0.0, 1.0, 0.05, 1.0);
  Rng rng(3);
  const Signal f = random_signal(g, 1, rng), h = random_signal(g, 1, rng);
  const Complex a = (h.values().conjugate().cwiseProduct(antiderivative(f).values())).sum();
  const Complex b = (antiderivative_adjoint(h).values().conjugate().cwiseProduct(f.values())).sum();
  CHECK(std::abs(a - b) < 1e-12);
  const Complex c = (h.values().conjugate().cwiseProduct(derivative(f).values())).sum();
  const Complex d = (derivative_adjoint(h).values().conjugate().cwiseProduct(f.values())).sum();
  CHECK(std::abs(c - d) < 1e-10);
}

TEST_CASE("continuous symbol lies on the circle of radius 1/(2 nu)") {
  for (double nu : {0.5, 1.0, 2.0})
    for (double xi = -200.0; xi <= 200.0; xi += 0.37) {
      const Complex z = 1.0 / Complex(nu, xi);  // independent formula
      CHECK(std::abs(h_nu(xi, nu) - z) < 1e-15);
      CHECK(std::abs(std::abs(z - 0.5 / nu) - 0.5 / nu) < 1e-12);
    }
}

TEST_CASE("discrete symbol circle contains the rectangle-rule symbol") {
  // Symbol of the rectangle rule at frequency xi: dt / (1 - exp(-(nu + i xi) dt)).
  const double dt = 0.01;
  for (double nu : {0.5, 1.0, 2.0}) {
    const SymbolCircle c = discrete_symbol_circle(dt, nu);
    for (double xi = 0.0; xi < 2 * std::numbers::pi / dt; xi += 3.1) {
      const Complex s = dt / (1.0 - std::exp(-Complex(nu, xi) * dt));
      CHECK(std::abs(std::abs(s - c.center) - c.radius) < 1e-10 * c.radius);
    }
    CHECK(c.center + c.radius == doctest::Approx(dt / (1 - std::exp(-nu * dt))));
  }
}

TEST_CASE("dense antiderivative norm respects 1/nu on random weights") {
  Rng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const double nu = rng.uniform(0.5, 3.0);
    const TimeGrid g = TimeGrid::window(0.0, 8.0, 0.02, nu);
    const NormEstimate ne = dense_weighted_norm(to_dense(antiderivative_op(1), g), g, 1, 1, nu);
    CHECK(ne.value <= 1.0 / nu + 0.02);
    CHECK(ne.value >= 0.9 / nu);
  }
}

TEST_CASE("derivative is accretive in the weighted inner product") {
  const TimeGrid g = TimeGrid::window(0.0, 10.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::smooth(g, 1, 5, 10, 9.0, 1.0);
  for (const auto& phi : p.probes()) {
    const double re = inner_nu(derivative(phi), phi).real();
    CHECK(re >= 0.0);
    CHECK(re / std::pow(norm_nu(phi), 2) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("Fourier-Laplace round trip") {
  const TimeGrid g = TimeGrid::window(0.0, 6.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::smooth(g, 2, 9, 3, 5.0);
  for (const auto& phi : p.probes()) {
    const Signal back = inverse_fourier_laplace(fourier_laplace(phi));
    CHECK(norm_nu(back - phi) <= 1e-10 * norm_nu(phi));
  }
}

TEST_CASE("multiplier with symbol z reproduces the antiderivative") {
  const TimeGrid g = TimeGrid::window(0.0, 12.0, 5e-4, 1.0);
  const ProbeSet p = ProbeSet::smooth(g, 1, 4, 3, 8.0, 2.0);
  const MultiplierFunction m = MultiplierFunction::scalar([](Complex z) { return z; }, 1.0);
  for (const auto& phi : p.probes()) {
    const Signal a = antiderivative(phi), b = apply_multiplier(m, phi);
    CHECK(norm_nu(a - b) <= 1e-3 * norm_nu(b));
  }
}

TEST_CASE("resolvent series agrees with the direct resolvent") {
  const TimeGrid g = TimeGrid::window(0.0, 4.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 1, 2, 3, 3.0);
  for (double eps : {0.05, 0.3}) {
    for (const auto& f : p.probes()) {
      Index terms = 0;
      const Signal a = resolvent(f, eps), b = resolvent_series(f, eps, 1e-10, std::nullopt, &terms);
      CHECK(norm_nu(a - b) <= 1e-8 * norm_nu(a));
      CHECK(terms > 0);
    }
  }
}
