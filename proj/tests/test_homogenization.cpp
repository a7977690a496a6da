// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "evocalc/causal_op.hpp"
#include "evocalc/homogenization.hpp"
#include "evocalc/time_calculus.hpp"

using namespace evo;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson on [0, 1], used as an independent quadrature oracle.
double simpson(const std::function<double(double)>& f, int n = 2000) {
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("I0 series matches quadrature of exp(-sin)") {
  // Oracle 1: integral representation I0(1) = int_0^1 exp(-sin 2 pi x) dx.
  const double quad = simpson([](double x) { return std::exp(-std::sin(2 * kPi * x)); });
  CHECK(std::abs(bessel_i0(1.0) - quad) < 1e-12);
  // Oracle 2: series sum (z/2)^{2k} / (k!)^2 accumulated in reverse.
  for (double z : {0.1, 1.0, 2.5, 6.0}) {
    double s = 0.0;
    for (int k = 60; k >= 0; --k) s += std::pow(z / 2, 2 * k) / std::pow(std::tgamma(k + 1.0), 2);
    CHECK(bessel_i0(z) == doctest::Approx(s).epsilon(1e-13));
  }
  CHECK(bessel_i0(0.0) == 1.0);
}

TEST_CASE("harmonic mean of 2 + sin is sqrt(3)") {
  OscillatoryFamily fam;
  fam.base = [](double x) { return Complex(2.0 + std::sin(2 * kPi * x)); };
  const double quad = 1.0 / simpson([](double x) { return 1.0 / (2.0 + std::sin(2 * kPi * x)); });
  CHECK(std::abs(quad - std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(fam.harmonic_mean().real() - std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(fam.mean().real() - 2.0) < 1e-12);
  CHECK(fam.min_real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fam.periodicity_defect() < 1e-12);
}

TEST_CASE("log-log slope of an exact power law") {
  const std::vector<double> x = {4, 8, 16, 32};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("product limit of constant profiles is exact") {
  const TimeGrid g = TimeGrid::window(0.0, 4.0, 0.01, 1.0);
  const std::vector<Profile> a = {[](double) { return Complex(2.0); }, [](double) { return Complex(3.0); }};
  const ProbeSet p = ProbeSet::standard(g, 1, 1, 4, 3.0);
  const double weak = weak_pairing_error(product_operator(a, 8.0), product_limit(a), p, 1.0);
  CHECK(weak <= 1e-12);
}

TEST_CASE("sin(2 pi n t) converges weakly but not strongly") {
  const TimeGrid g = TimeGrid::window(0.0, 6.0, 1.0 / 2048.0, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 1, 42, 6, 4.0);
  const Profile s = [](double x) { return Complex(std::sin(2 * kPi * x)); };
  double prev = 1.0;
  for (double n : {8.0, 16.0, 32.0}) {
    const TopologyErrors e = topology_errors(oscillatory_multiplication(s, n), zero_op(1, 1), p, 1.0);
    CHECK(e.weak <= e.strong * (1 + 1e-12));
    CHECK(e.strong <= e.norm * (1 + 1e-12));
    CHECK(e.weak < prev);
    CHECK(std::abs(e.strong - 1.0 / std::sqrt(2.0)) <= 0.1 / std::sqrt(2.0));
    prev = e.weak;
  }
}

TEST_CASE("topology ordering holds for random multipliers") {
  Rng rng(9);
  const TimeGrid g = TimeGrid::window(0.0, 4.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 1, 3, 4, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = rng.uniform(0.5, 2.0), w = rng.uniform(1.0, 9.0);
    const CausalOp s = multiply_op(Coefficient::scalar_time([a, w](double t) { return Complex(a * std::cos(w * t)); }));
    const TopologyErrors e = topology_errors(s, zero_op(1, 1), p, 1.0);
    CHECK(e.weak <= e.strong * (1 + 1e-12));
    CHECK(e.strong <= e.norm * (1 + 1e-12));
  }
}

TEST_CASE("degraded accretivity constant stays in (0, c)") {
  for (double c = 0.05; c < 1.0; c += 0.05) {
    const double d = degraded_constant(c);
    CHECK(d > 0.0);
    CHECK(d < c);
  }
}

TEST_CASE("sampled accretivity of nu + multiplication") {
  const TimeGrid g = TimeGrid::window(0.0, 6.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 1, 2, 4, 5.0);
  const CausalOp s = multiply_op(Coefficient::scalar_time([](double t) { return Complex(1.0 + 0.5 * std::sin(t), 0.3); }));
  const double c = sampled_accretivity(s, p, 1.0);
  CHECK(c >= 0.5 - 1e-12);
}
