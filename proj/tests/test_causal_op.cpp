// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evocalc/causal_op.hpp"
#include "evocalc/error.hpp"
#include "evocalc/time_calculus.hpp"

using namespace evo;

TEST_CASE("causal operators have zero defect, forward shifts do not") {
  const TimeGrid g = TimeGrid::window(0.0, 4.0, 0.01, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 1, 42, 3, 3.5, 0.5);
  CHECK(max_causality_defect(identity_op(1), p, 1.0) == 0.0);
  CHECK(max_causality_defect(antiderivative_op(1), p, 1.0) <= 1e-14);
  CHECK(max_causality_defect(derivative_op(1), p, 1.0) <= 1e-12);
  CHECK(max_causality_defect(shift_op(-0.5, 1), p, 1.0) == 0.0);
  CHECK(max_causality_defect(resolvent_op(0.2, 1), p, 1.0) <= 1e-14);
  CHECK(max_causality_defect(shift_op(0.25, 1), p, 1.0) > 0.1);
}

TEST_CASE("dense form of a causal operator is block lower triangular") {
  const TimeGrid g = TimeGrid::window(0.0, 0.5, 0.05, 1.0);
  const CMatrix h = to_dense(antiderivative_op(2), g);
  CHECK(h.rows() == 2 * g.n);
  double upper = 0.0;
  for (Index j = 0; j < h.cols(); ++j)
    for (Index i = 0; i < h.rows(); ++i)
      if (i / 2 < j / 2) upper = std::max(upper, std::abs(h(i, j)));
  CHECK(upper == 0.0);
}

TEST_CASE("probe sup is a lower estimate of the dense norm") {
  const TimeGrid g = TimeGrid::window(0.0, 6.0, 0.02, 1.0);
  const ProbeSet p = ProbeSet::standard(g, 1, 3, 8, 5.0);
  const CausalOp s = compose(antiderivative_op(1), multiply_op(Coefficient::scalar_time([](double t) {
                                                   return Complex(1.0 + 0.5 * std::sin(t));
                                                 })));
  const NormEstimate dense = dense_weighted_norm(to_dense(s, g), g, 1, 1, 1.0);
  CHECK(probe_sup(s, 1.0, p) <= dense.value * (1 + 1e-9));
  CHECK(dense.value <= 1.5 + 0.03);
}

TEST_CASE("neumann term count is the smallest admissible one") {
  // Oracle: smallest K with a theta^(K+1) / (1 - theta) <= tol, by direct search.
  for (double theta : {0.1, 0.5, 0.9})
    for (double a : {0.5, 1.0, 4.0}) {
      const double tol = 1e-8;
      Index k = 0;
      while (a * std::pow(theta, k + 1) / (1 - theta) > tol) ++k;
      const Index got = neumann_terms(theta, tol, a);
      CHECK(got >= k - 1);
      CHECK(got <= k + 1);
      CHECK(a * std::pow(theta, got + 1) / (1 - theta) <= tol * (1 + 1e-9));
    }
  CHECK_THROWS_AS(neumann_terms(1.0, 1e-8, 1.0), Error);
}

TEST_CASE("neumann inverse of D - N matches a dense solve") {
  const TimeGrid g = TimeGrid::window(0.0, 3.0, 0.02, 1.0);
  const double nu_eff = (1.0 - std::exp(-g.dt)) / g.dt;
  const Coefficient nmul = Coefficient::scalar_time([](double t) { return Complex(0.3 * std::cos(t)); });
  NeumannOptions opt;
  opt.theta_bound = 0.3 / nu_eff;
  opt.a_inv_norm = 1.0 / nu_eff;
  opt.tol = 1e-12;
  const CausalOp inv = neumann_inverse(antiderivative_op(1), multiply_op(nmul), opt);
  // Dense geometric-series oracle: (D - N)^{-1} by LU of the materialized operator.
  const CMatrix b = to_dense(add(derivative_op(1), multiply_op(nmul), -1.0), g);
  const ProbeSet p = ProbeSet::standard(g, 1, 8, 3, 2.5);
  for (const auto& f : p.probes()) {
    const CVector u = b.partialPivLu().solve(f.flat());
    CHECK((inv(f).flat() - u).norm() <= 1e-9 * u.norm());
  }
}

TEST_CASE("accretive inversion solves B u = f") {
  const TimeGrid g = TimeGrid::window(0.0, 2.0, 0.02, 1.0);
  const CausalOp b =
      add(derivative_op(1), multiply_op(Coefficient::scalar_time([](double t) { return Complex(1.0 + 0.5 * std::sin(t)); })));
  const ProbeSet p = ProbeSet::standard(g, 1, 5, 3, 1.5);
  for (const auto& f : p.probes()) {
    const Signal u = invert_accretive(b, 0.5, f);
    CHECK(norm_nu(b(u) - f) <= 1e-9 * norm_nu(f));
  }
}

TEST_CASE("transfer functions of the elementary operators") {
  const TimeGrid g = TimeGrid::window(0.0, 20.0, 1e-3, 0.5);
  const std::vector<Complex> zs = {1.0, Complex(1.0, 1.0), 2.0};
  const auto id = transfer_function(identity_op(1), zs, g);
  const auto h = transfer_function(antiderivative_op(1), zs, g);
  const auto s = transfer_function(shift_op(-1.0, 1), zs, g);
  for (size_t i = 0; i < zs.size(); ++i) {
    CHECK(std::abs(id[i](0, 0) - 1.0) <= 1e-3);
    CHECK(std::abs(h[i](0, 0) - 1.0 / zs[i]) <= 1e-3);
    CHECK(std::abs(s[i](0, 0) - std::exp(-zs[i])) <= 1e-3);
  }
}

TEST_CASE("translation invariance is detected") {
  const TimeGrid g = TimeGrid::window(0.0, 4.0, 0.01, 1.0);
  CHECK(translation_defect(antiderivative_op(1), g) <= 1e-12);
  const CausalOp tv = multiply_op(Coefficient::scalar_time([](double t) { return Complex(1.0 + t); }));
  CHECK(translation_defect(tv, g) > 1e-3);
}

TEST_CASE("composition and sums respect dimensions") {
  CHECK_THROWS_AS(compose(identity_op(2), identity_op(3)), Error);
  CHECK_THROWS_AS(add(identity_op(2), identity_op(3)), Error);
  const TimeGrid g = TimeGrid::window(0.0, 1.0, 0.1, 1.0);
  const Signal f = Signal::scalar(g, [](double t) { return Complex(t); });
  CHECK(norm_nu(add(identity_op(1), identity_op(1), -1.0)(f)) == 0.0);
  CHECK(norm_nu(scale_op(identity_op(1), 2.0)(f) - 2.0 * f) == 0.0);
}
