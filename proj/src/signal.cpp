// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace evo {

namespace {

std::string grid_str(const TimeGrid& g) {
  std::ostringstream os;
  os << "(t0=" << g.t0 << ", dt=" << g.dt << ", n=" << g.n << ")";
  return os.str();
}

}  // namespace

TimeGrid::TimeGrid(double t0_, double dt_, Index n_, double nu_) : t0(t0_), dt(dt_), n(n_), nu(nu_) {
  require(std::isfinite(t0) && std::isfinite(nu), ErrorCode::InvalidArgument, "grid: non-finite t0 or nu");
  require(dt > 0 && std::isfinite(dt), ErrorCode::InvalidArgument, "grid: dt must be positive");
  require(nu >= 0, ErrorCode::InvalidArgument, "grid: nu must be non-negative");
  require(n >= 2, ErrorCode::InvalidArgument, "grid: need at least two nodes");
}

TimeGrid TimeGrid::window(double t0, double t_end, double dt, double nu) {
  require(dt > 0, ErrorCode::InvalidArgument, "grid: dt must be positive");
  require(t_end > t0, ErrorCode::InvalidArgument, "grid: empty window");
  const auto steps = static_cast<Index>(std::llround((t_end - t0) / dt));
  return TimeGrid(t0, dt, steps + 1, nu);
}

bool TimeGrid::same_lattice(const TimeGrid& o) const {
  return n == o.n && std::abs(dt - o.dt) <= 1e-14 * dt && std::abs(t0 - o.t0) <= 1e-12 * std::max(1.0, dt);
}

TimeGrid TimeGrid::with_nu(double nu_) const {
  TimeGrid g = *this;
  g.nu = nu_;
  return g;
}

Index TimeGrid::first_at_or_after(double t) const {
  if (!(t > t0)) return 0;
  const double s = (t - t0) / dt;
  if (s > static_cast<double>(n)) return n;
  auto k = static_cast<Index>(std::ceil(s - 1e-9));
  return std::clamp<Index>(k, 0, n);
}

Index TimeGrid::aligned_steps(double h) const {
  const double s = h / dt;
  const double r = std::round(s);
  require(std::abs(s - r) <= 1e-9 * std::max(1.0, std::abs(s)), ErrorCode::InvalidArgument,
          "shift: h is not a multiple of dt");
  return static_cast<Index>(r);
}

double TimeGrid::weight(Index k, double nu_) const {
  const double w = (k == 0 || k == n - 1) ? 0.5 * dt : dt;
  return w * std::exp(-2.0 * nu_ * node(k));
}

Eigen::VectorXd TimeGrid::weights(double nu_) const {
  Eigen::VectorXd w(n);
  for (Index k = 0; k < n; ++k) w[k] = weight(k, nu_);
  return w;
}

Signal::Signal(const TimeGrid& grid, Index dim) : grid_(grid), values_(CMatrix::Zero(dim, grid.n)) {
  require(dim >= 1, ErrorCode::InvalidArgument, "signal: dim must be positive");
}

Signal::Signal(const TimeGrid& grid, CMatrix values) : grid_(grid), values_(std::move(values)) {
  require(values_.rows() >= 1, ErrorCode::InvalidArgument, "signal: dim must be positive");
  require(values_.cols() == grid.n, ErrorCode::GridMismatch, "signal: value count differs from grid.n");
}

Signal Signal::from_function(const TimeGrid& grid, Index dim, const std::function<CVector(double)>& f) {
  Signal s(grid, dim);
  for (Index k = 0; k < grid.n; ++k) {
    CVector v = f(grid.node(k));
    require(v.size() == dim, ErrorCode::DimMismatch, "signal: sampler returned wrong length");
    s.values_.col(k) = v;
  }
  return s;
}

Signal Signal::scalar(const TimeGrid& grid, const std::function<Complex(double)>& f) {
  Signal s(grid, 1);
  for (Index k = 0; k < grid.n; ++k) s.values_(0, k) = f(grid.node(k));
  return s;
}

Signal Signal::indicator(const TimeGrid& grid, double a, double b, Index dim, std::optional<CVector> direction) {
  CVector d = direction ? *direction : CVector::Unit(dim, 0);
  require(d.size() == dim, ErrorCode::DimMismatch, "indicator: direction length differs from dim");
  Signal s(grid, dim);
  const Index k0 = grid.first_at_or_after(a);
  const Index k1 = grid.first_at_or_after(b);
  for (Index k = k0; k < k1; ++k) s.values_.col(k) = d;
  return s;
}

Signal Signal::with_nu(double nu) const {
  Signal s = *this;
  s.grid_.nu = nu;
  return s;
}

Index Signal::support_start() const {
  for (Index k = 0; k < size(); ++k)
    if (values_.col(k).cwiseAbs().maxCoeff() != 0.0) return k;
  return size();
}

CVector Signal::flat() const { return Eigen::Map<const CVector>(values_.data(), values_.size()); }

Signal Signal::from_flat(const TimeGrid& grid, Index dim, const CVector& v) {
  require(v.size() == dim * grid.n, ErrorCode::DimMismatch, "signal: flat vector has wrong length");
  return Signal(grid, Eigen::Map<const CMatrix>(v.data(), dim, grid.n));
}

Signal& Signal::operator+=(const Signal& o) {
  check_compatible(*this, o);
  values_ += o.values_;
  return *this;
}

Signal& Signal::operator-=(const Signal& o) {
  check_compatible(*this, o);
  values_ -= o.values_;
  return *this;
}

Signal& Signal::operator*=(Complex a) {
  values_ *= a;
  return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(Complex a, Signal s) { return s *= a; }

void check_compatible(const Signal& f, const Signal& g) {
  if (!f.grid().same_lattice(g.grid()))
    fail(ErrorCode::GridMismatch, "grid mismatch: " + grid_str(f.grid()) + " vs " + grid_str(g.grid()));
  require(f.dim() == g.dim(), ErrorCode::DimMismatch, "signal dims differ");
}

Complex inner_nu(const Signal& f, const Signal& g, double nu) {
  check_compatible(f, g);
  const TimeGrid& grid = f.grid();
  Complex acc = 0.0;
  for (Index k = 0; k < grid.n; ++k) acc += grid.weight(k, nu) * f.values().col(k).dot(g.values().col(k));
  return acc;
}

Complex inner_nu(const Signal& f, const Signal& g) { return inner_nu(f, g, f.grid().nu); }

double norm_nu(const Signal& f, double nu) {
  const TimeGrid& grid = f.grid();
  double acc = 0.0;
  for (Index k = 0; k < grid.n; ++k) acc += grid.weight(k, nu) * f.values().col(k).squaredNorm();
  return std::sqrt(acc);
}

double norm_nu(const Signal& f) { return norm_nu(f, f.grid().nu); }

double max_abs(const Signal& f) {
  double m = 0.0;
  for (Index k = 0; k < f.size(); ++k) m = std::max(m, f.values().col(k).norm());
  return m;
}

Signal truncate_before(const Signal& f, double t) {
  Signal out = f;
  const Index k0 = f.grid().first_at_or_after(t);
  if (k0 < f.size()) out.values().rightCols(f.size() - k0).setZero();
  return out;
}

Signal shift(const Signal& f, double h) {
  const Index s = f.grid().aligned_steps(h);
  const Index n = f.size();
  Signal out(f.grid(), f.dim());
  // out_k = f_{k+s}
  const Index lo = std::max<Index>(0, -s);
  const Index hi = std::min<Index>(n, n - s);
  if (hi > lo) out.values().middleCols(lo, hi - lo) = f.values().middleCols(lo + s, hi - lo);
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient

Coefficient Coefficient::from_segment(Segment s) {
  Coefficient c;
  c.dim_ = s.dim();
  c.segments_.push_back(std::move(s));
  return c;
}

Coefficient Coefficient::constant(const CMatrix& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, ErrorCode::DimMismatch, "coefficient: matrix must be square");
  require(m.allFinite(), ErrorCode::InvalidArgument, "coefficient: non-finite entries");
  Segment s;
  s.block = m.rows();
  s.sampler = [m](double, Index) { return m; };
  return from_segment(std::move(s));
}

Coefficient Coefficient::identity(Index dim, Complex scale) {
  return constant(scale * CMatrix::Identity(dim, dim));
}

Coefficient Coefficient::zero(Index dim) { return constant(CMatrix::Zero(dim, dim)); }

Coefficient Coefficient::time_profile(Index dim, std::function<CMatrix(double)> f) {
  Segment s;
  s.block = dim;
  s.time_dep = true;
  s.sampler = [f = std::move(f)](double t, Index) { return f(t); };
  return from_segment(std::move(s));
}

Coefficient Coefficient::scalar_time(std::function<Complex(double)> f, Index dim) {
  return time_profile(dim, [f = std::move(f), dim](double t) -> CMatrix {
    return f(t) * CMatrix::Identity(dim, dim);
  });
}

Coefficient Coefficient::space_profile(Index cells, Index block, std::function<CMatrix(Index)> f) {
  require(cells >= 1 && block >= 1, ErrorCode::InvalidArgument, "coefficient: empty space profile");
  Segment s;
  s.block = block;
  s.cells = cells;
  s.space_dep = true;
  s.sampler = [f = std::move(f)](double, Index cell) { return f(cell); };
  return from_segment(std::move(s));
}

Coefficient Coefficient::scalar_space(Index cells, std::function<Complex(Index)> f) {
  return space_profile(cells, 1, [f = std::move(f)](Index cell) -> CMatrix {
    CMatrix m(1, 1);
    m(0, 0) = f(cell);
    return m;
  });
}

Coefficient Coefficient::space_time_profile(Index cells, Index block, BlockSampler f) {
  require(cells >= 1 && block >= 1, ErrorCode::InvalidArgument, "coefficient: empty space-time profile");
  Segment s;
  s.block = block;
  s.cells = cells;
  s.space_dep = true;
  s.time_dep = true;
  s.sampler = std::move(f);
  return from_segment(std::move(s));
}

Coefficient Coefficient::scalar_space_time(Index cells, std::function<Complex(double, Index)> f) {
  return space_time_profile(cells, 1, [f = std::move(f)](double t, Index cell) -> CMatrix {
    CMatrix m(1, 1);
    m(0, 0) = f(t, cell);
    return m;
  });
}

Coefficient Coefficient::operator_profile(Index dim, OperatorSampler f, bool time_dependent) {
  Segment s;
  s.pointwise = false;
  s.block = dim;
  s.cells = 1;
  s.time_dep = time_dependent;
  s.space_dep = true;
  if (!time_dependent) {
    auto m = std::make_shared<SparseC>(f(0.0));
    require(m->rows() == dim && m->cols() == dim, ErrorCode::DimMismatch, "coefficient: operator size");
    s.cached = m;
  }
  s.op = std::move(f);
  return from_segment(std::move(s));
}

Coefficient Coefficient::block_diagonal(const std::vector<Coefficient>& parts) {
  require(!parts.empty(), ErrorCode::InvalidArgument, "coefficient: empty block list");
  Coefficient c;
  for (const auto& p : parts) {
    for (const auto& s : p.segments_) c.segments_.push_back(s);
    c.dim_ += p.dim_;
  }
  return c;
}

Coefficient Coefficient::combination(const Coefficient& a, Complex alpha, const Coefficient& b) {
  require(a.dim() == b.dim(), ErrorCode::DimMismatch, "coefficient: combination of different dims");
  const bool td = a.time_dependent() || b.time_dependent();
  return operator_profile(a.dim(), [a, alpha, b](double t) -> SparseC {
    SparseC m = a.assemble(t) + alpha * b.assemble(t);
    m.makeCompressed();
    return m;
  }, td);
}

Coefficient Coefficient::with_positivity(double c) const {
  Coefficient out = *this;
  out.pos_const_ = c;
  return out;
}

Coefficient Coefficient::with_lipschitz(double l) const {
  Coefficient out = *this;
  out.lip_const_ = l;
  return out;
}

Coefficient Coefficient::with_derivative(const Coefficient& d) const {
  require(d.dim() == dim_, ErrorCode::DimMismatch, "coefficient: derivative has another dim");
  Coefficient out = *this;
  out.derivative_ = std::make_shared<const Coefficient>(d);
  return out;
}

CoefficientKind Coefficient::kind() const {
  bool t = false, x = false;
  for (const auto& s : segments_) {
    t = t || s.time_dep;
    x = x || s.space_dep;
  }
  if (t && x) return CoefficientKind::SpaceTimeProfile;
  if (t) return CoefficientKind::TimeProfile;
  if (x) return CoefficientKind::SpaceProfile;
  return CoefficientKind::ConstantMatrix;
}

bool Coefficient::time_dependent() const {
  return std::any_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.time_dep; });
}

bool Coefficient::pointwise() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.pointwise; });
}

CMatrix Coefficient::sample(double t, Index cell) const {
  require(segments_.size() == 1 && segments_[0].pointwise, ErrorCode::InvalidArgument,
          "coefficient: sample() needs a single pointwise profile");
  const Segment& s = segments_[0];
  require(cell >= 0 && cell < s.cells, ErrorCode::InvalidArgument, "coefficient: cell out of range");
  CMatrix m = s.sampler(t, cell);
  require(m.rows() == s.block && m.cols() == s.block, ErrorCode::DimMismatch, "coefficient: sampler size");
  return m;
}

SparseC Coefficient::assemble(double t) const {
  std::vector<Eigen::Triplet<Complex>> trip;
  Index off = 0;
  for (const auto& s : segments_) {
    if (s.pointwise) {
      for (Index cell = 0; cell < s.cells; ++cell) {
        const CMatrix m = s.sampler(t, cell);
        require(m.allFinite(), ErrorCode::Numerical, "coefficient: non-finite sample");
        const Index base = off + cell * s.block;
        for (Index i = 0; i < s.block; ++i)
          for (Index j = 0; j < s.block; ++j)
            if (m(i, j) != 0.0) trip.emplace_back(base + i, base + j, m(i, j));
      }
    } else {
      const SparseC m = s.cached ? *s.cached : s.op(t);
      for (Index k = 0; k < m.outerSize(); ++k)
        for (SparseC::InnerIterator it(m, k); it; ++it) trip.emplace_back(off + it.row(), off + it.col(), it.value());
    }
    off += s.dim();
  }
  SparseC out(dim_, dim_);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

void Coefficient::apply(double t, const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const {
  Index off = 0;
  for (const auto& s : segments_) {
    if (s.pointwise) {
      if (s.block == 1) {
        for (Index cell = 0; cell < s.cells; ++cell) y[off + cell] = s.sampler(t, cell)(0, 0) * x[off + cell];
      } else {
        for (Index cell = 0; cell < s.cells; ++cell) {
          const Index base = off + cell * s.block;
          y.segment(base, s.block) = s.sampler(t, cell) * x.segment(base, s.block);
        }
      }
    } else {
      const Index d = s.dim();
      if (s.cached) {
        y.segment(off, d) = (*s.cached) * x.segment(off, d);
      } else {
        const SparseC m = s.op(t);
        y.segment(off, d) = m * x.segment(off, d);
      }
    }
    off += s.dim();
  }
}

Coefficient Coefficient::inverse() const {
  require(pointwise(), ErrorCode::InvalidArgument, "coefficient: inverse() needs a pointwise coefficient");
  std::vector<Coefficient> parts;
  for (const auto& s : segments_) {
    Segment r = s;
    auto base = s.sampler;
    r.sampler = [base](double t, Index cell) -> CMatrix {
      const CMatrix m = base(t, cell);
      Eigen::FullPivLU<CMatrix> lu(m);
      require(lu.isInvertible(), ErrorCode::Numerical, "coefficient: singular sample in inverse()");
      return lu.inverse();
    };
    parts.push_back(from_segment(std::move(r)));
  }
  return parts.size() == 1 ? parts[0] : block_diagonal(parts);
}

namespace {

template <class F>
void for_samples(const TimeGrid& grid, Index stride, bool time_dep, F&& f) {
  if (!time_dep) {
    f(grid.t0);
    return;
  }
  stride = std::max<Index>(1, stride);
  for (Index k = 0; k < grid.n; k += stride) f(grid.node(k));
  if ((grid.n - 1) % stride != 0) f(grid.t_end());
}

}  // namespace

double Coefficient::sup_norm(const TimeGrid& grid, Index stride) const {
  double sup = 0.0;
  for (const auto& s : segments_) {
    for_samples(grid, stride, s.time_dep, [&](double t) {
      if (s.pointwise) {
        for (Index cell = 0; cell < s.cells; ++cell) {
          const CMatrix m = s.sampler(t, cell);
          const double v = (m.size() == 1) ? std::abs(m(0, 0)) : Eigen::JacobiSVD<CMatrix>(m).singularValues()[0];
          sup = std::max(sup, v);
        }
      } else {
        const CMatrix m = s.cached ? CMatrix(*s.cached) : CMatrix(s.op(t));
        sup = std::max(sup, Eigen::JacobiSVD<CMatrix>(m).singularValues()[0]);
      }
    });
  }
  return sup;
}

double Coefficient::min_real_part(const TimeGrid& grid, Index stride) const {
  double lo = std::numeric_limits<double>::infinity();
  auto herm_min = [](const CMatrix& m) {
    if (m.size() == 1) return m(0, 0).real();
    const CMatrix h = 0.5 * (m + m.adjoint());
    return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues()[0];
  };
  for (const auto& s : segments_) {
    for_samples(grid, stride, s.time_dep, [&](double t) {
      if (s.pointwise) {
        for (Index cell = 0; cell < s.cells; ++cell) lo = std::min(lo, herm_min(s.sampler(t, cell)));
      } else {
        lo = std::min(lo, herm_min(s.cached ? CMatrix(*s.cached) : CMatrix(s.op(t))));
      }
    });
  }
  return lo;
}

bool Coefficient::check_positivity(const TimeGrid& grid, std::optional<double> c, Index stride, double slack) const {
  const std::optional<double> target = c ? c : pos_const_;
  if (!target) return true;
  return min_real_part(grid, stride) >= *target - slack;
}

Signal multiply(const Coefficient& c, const Signal& f) {
  require(c.dim() == f.dim(), ErrorCode::DimMismatch, "multiply: coefficient and signal dims differ");
  const TimeGrid& g = f.grid();
  Signal out(g, f.dim());
  if (!c.time_dependent()) {
    const SparseC m = c.assemble(g.t0);
    out.values() = m * f.values();
    return out;
  }
  CVector y(f.dim());
  for (Index k = 0; k < g.n; ++k) {
    c.apply(g.node(k), f.values().col(k), y);
    out.values().col(k) = y;
  }
  return out;
}

}  // namespace evo
