// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evocalc/causal_op.hpp"
#include "evocalc/error.hpp"
#include "evocalc/signal.hpp"

using namespace evo;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected evo::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("window grid covers the interval") {
  const TimeGrid g = TimeGrid::window(0.0, 30.0, 0.01, 1.0);
  CHECK(g.n == 3001);
  CHECK(g.t_end() == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(g.first_at_or_after(0.015) == 2);
  CHECK(g.same_lattice(g.with_nu(2.0)));
  CHECK(g.with_nu(2.0).nu == 2.0);
}

TEST_CASE("bad grids are rejected") {
  CHECK(code_of([] { TimeGrid(0.0, -0.1, 10, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { TimeGrid(0.0, 0.1, 10, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { TimeGrid(0.0, 0.1, 1, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("weighted norm of the constant matches the closed form") {
  // int_0^T exp(-2 nu t) dt = (1 - exp(-2 nu T)) / (2 nu); trapezoid error is O(dt^2).
  for (double nu : {0.5, 1.0, 2.0}) {
    const TimeGrid g = TimeGrid::window(0.0, 10.0, 1e-3, nu);
    const Signal one = Signal::scalar(g, [](double) { return Complex(1.0); });
    const double exact = (1.0 - std::exp(-2.0 * nu * 10.0)) / (2.0 * nu);
    CHECK(std::pow(norm_nu(one), 2) == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("inner product is conjugate linear in the first slot and Cauchy-Schwarz holds") {
  const TimeGrid g = TimeGrid::window(0.0, 5.0, 0.01, 1.0);
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Signal f(g, 2), h(g, 2);
    for (Index k = 0; k < g.n; ++k)
      for (Index i = 0; i < 2; ++i) {
        f.values()(i, k) = rng.complex_normal();
        h.values()(i, k) = rng.complex_normal();
      }
    const Complex a(0.3, -1.2);
    const Complex lhs = inner_nu(a * f, h);
    CHECK(std::abs(lhs - std::conj(a) * inner_nu(f, h)) <= 1e-12 * std::abs(lhs) + 1e-14);
    CHECK(std::abs(inner_nu(f, a * h) - a * inner_nu(f, h)) <= 1e-12 * std::abs(lhs) + 1e-14);
    CHECK(std::abs(inner_nu(h, f) - std::conj(inner_nu(f, h))) <= 1e-12 * std::abs(lhs) + 1e-14);
    CHECK(std::abs(inner_nu(f, h)) <= norm_nu(f) * norm_nu(h) * (1 + 1e-12));
    CHECK(std::abs(inner_nu(f, f).imag()) <= 1e-12 * norm_nu(f) * norm_nu(f));
  }
}

TEST_CASE("mixing grids or dimensions fails loudly") {
  const TimeGrid g = TimeGrid::window(0.0, 1.0, 0.1, 1.0);
  const TimeGrid g2 = TimeGrid::window(0.0, 1.0, 0.05, 1.0);
  const Signal a(g, 1), b(g2, 1), c(g, 2);
  CHECK(code_of([&] { (void)(a + b); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { (void)(a + c); }) == ErrorCode::DimMismatch);
}

TEST_CASE("truncation and shift act on the lattice") {
  const TimeGrid g = TimeGrid::window(0.0, 2.0, 0.1, 1.0);
  const Signal f = Signal::scalar(g, [](double t) { return Complex(1.0 + t); });
  const Signal q = truncate_before(f, 1.0);
  for (Index k = 0; k < g.n; ++k) {
    if (g.node(k) < 1.0 - 1e-12) CHECK(q.values()(0, k) == f.values()(0, k));
    else CHECK(std::abs(q.values()(0, k)) == 0.0);
  }
  const Signal s = shift(f, -0.5);  // delay by 0.5
  const Index d = g.aligned_steps(0.5);
  CHECK(d == 5);
  for (Index k = d; k < g.n; ++k) CHECK(std::abs(s.values()(0, k) - f.values()(0, k - d)) < 1e-15);
  for (Index k = 0; k < d; ++k) CHECK(std::abs(s.values()(0, k)) == 0.0);
}

TEST_CASE("coefficients sample, assemble and invert") {
  CMatrix m(2, 2);
  m << 2.0, 1.0, 0.0, 3.0;
  const Coefficient c = Coefficient::constant(m);
  CHECK((c.sample(0.7) - m).norm() == 0.0);
  CHECK((c.inverse().sample(1.3) * m - CMatrix::Identity(2, 2)).norm() < 1e-14);
  const Coefficient t = Coefficient::scalar_time([](double s) { return Complex(1.0 + s); });
  CHECK(t.time_dependent());
  CHECK(t.sample(2.0)(0, 0) == Complex(3.0));
  const TimeGrid g = TimeGrid::window(0.0, 1.0, 0.01, 1.0);
  CHECK(t.sup_norm(g) == doctest::Approx(2.0));
  CHECK(t.min_real_part(g) == doctest::Approx(1.0));
}

TEST_CASE("seeded rng is reproducible") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    (void)c.uniform();
  }
  CHECK(Rng(42).normal() != Rng(43).normal());
}
