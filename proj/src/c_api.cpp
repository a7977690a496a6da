// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#include "evocalc/evocalc.h"

#include <iostream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "evocalc/error.hpp"
#include "evocalc/evo_solvers.hpp"
#include "evocalc/experiments.hpp"
#include "evocalc/time_calculus.hpp"

struct evo_grid {
  evo::TimeGrid g;
};
struct evo_signal {
  evo::Signal s;
};
struct evo_report {
  evo::ConvergenceReport report;
  bool ok = false;
  std::string experiment, csv, json, failures, csv_path, json_path;
};
struct evo_suite {
  struct Entry {
    std::string name, failures;
    bool ok = false;
  };
  std::vector<Entry> entries;
  bool ok = false;
  std::string json, json_path;
};

namespace {

thread_local std::string g_last_error;

evo_status from_code(evo::ErrorCode c) {
  switch (c) {
    case evo::ErrorCode::InvalidArgument: return EVO_ERR_INVALID_ARGUMENT;
    case evo::ErrorCode::GridMismatch: return EVO_ERR_GRID_MISMATCH;
    case evo::ErrorCode::DimMismatch: return EVO_ERR_DIM_MISMATCH;
    case evo::ErrorCode::PreconditionFailed: return EVO_ERR_PRECONDITION;
    case evo::ErrorCode::Numerical: return EVO_ERR_NUMERICAL;
    case evo::ErrorCode::Config: return EVO_ERR_CONFIG;
    case evo::ErrorCode::Io: return EVO_ERR_IO;
  }
  return EVO_ERR_INTERNAL;
}

template <class F>
evo_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const evo::Error& e) {
    g_last_error = e.what();
    return from_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EVO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EVO_ERR_INTERNAL;
  }
}

evo_status null_arg(const char* what) {
  g_last_error = std::string(what) + " is NULL";
  return EVO_ERR_INVALID_ARGUMENT;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += s + "\n";
  return out;
}

evo_report* wrap(evo::RunResult r) {
  auto* h = new evo_report;
  h->ok = r.ok;
  h->experiment = r.report.experiment();
  h->csv = r.report.to_csv();
  h->json = r.report.to_json();
  h->failures = join(r.report.failures());
  h->csv_path = r.csv_path;
  h->json_path = r.json_path;
  h->report = std::move(r.report);
  return h;
}

evo_status finish_run(evo::RunResult r, evo_report** out) {
  const bool ok = r.ok;
  *out = wrap(std::move(r));
  if (!ok) {
    g_last_error = "verdict did not match expectation";
    return EVO_ERR_VERDICT;
  }
  return EVO_OK;
}

}  // namespace

extern "C" {

const char* evo_version(void) { return "0.1.0"; }

const char* evo_status_name(evo_status s) {
  switch (s) {
    case EVO_OK: return "ok";
    case EVO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case EVO_ERR_GRID_MISMATCH: return "grid mismatch";
    case EVO_ERR_DIM_MISMATCH: return "dimension mismatch";
    case EVO_ERR_PRECONDITION: return "precondition failed";
    case EVO_ERR_NUMERICAL: return "numerical failure";
    case EVO_ERR_CONFIG: return "config error";
    case EVO_ERR_IO: return "i/o error";
    case EVO_ERR_VERDICT: return "verdict failed";
    case EVO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* evo_last_error(void) { return g_last_error.c_str(); }

evo_status evo_grid_create(double t0, double dt, int64_t n, double nu, evo_grid** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new evo_grid{evo::TimeGrid(t0, dt, static_cast<evo::Index>(n), nu)};
    return EVO_OK;
  });
}

evo_status evo_grid_window(double t0, double t_end, double dt, double nu, evo_grid** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new evo_grid{evo::TimeGrid::window(t0, t_end, dt, nu)};
    return EVO_OK;
  });
}

evo_status evo_grid_info(const evo_grid* g, double* t0, double* dt, int64_t* n, double* nu) {
  if (!g) return null_arg("grid");
  if (t0) *t0 = g->g.t0;
  if (dt) *dt = g->g.dt;
  if (n) *n = g->g.n;
  if (nu) *nu = g->g.nu;
  return EVO_OK;
}

void evo_grid_destroy(evo_grid* g) { delete g; }

evo_status evo_signal_create(const evo_grid* g, int64_t dim, const double* re, const double* im, evo_signal** out) {
  if (!g) return null_arg("grid");
  if (!re) return null_arg("re");
  if (!out) return null_arg("out");
  return guarded([&] {
    evo::require(dim >= 1, evo::ErrorCode::InvalidArgument, "signal dim must be >= 1");
    evo::CMatrix v(dim, g->g.n);
    for (evo::Index k = 0; k < g->g.n; ++k)
      for (evo::Index i = 0; i < dim; ++i) {
        const size_t at = static_cast<size_t>(k * dim + i);
        v(i, k) = evo::Complex(re[at], im ? im[at] : 0.0);
      }
    *out = new evo_signal{evo::Signal(g->g, std::move(v))};
    return EVO_OK;
  });
}

evo_status evo_signal_shape(const evo_signal* s, int64_t* dim, int64_t* n) {
  if (!s) return null_arg("signal");
  if (dim) *dim = s->s.dim();
  if (n) *n = s->s.size();
  return EVO_OK;
}

evo_status evo_signal_values(const evo_signal* s, double* re, double* im, size_t count) {
  if (!s) return null_arg("signal");
  const size_t need = static_cast<size_t>(s->s.dim() * s->s.size());
  if (count < need) {
    g_last_error = "buffer holds " + std::to_string(count) + " values, need " + std::to_string(need);
    return EVO_ERR_INVALID_ARGUMENT;
  }
  const auto& v = s->s.values();
  for (evo::Index k = 0; k < v.cols(); ++k)
    for (evo::Index i = 0; i < v.rows(); ++i) {
      const size_t at = static_cast<size_t>(k * v.rows() + i);
      if (re) re[at] = v(i, k).real();
      if (im) im[at] = v(i, k).imag();
    }
  return EVO_OK;
}

evo_status evo_signal_norm(const evo_signal* s, double* out) {
  if (!s) return null_arg("signal");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = evo::norm_nu(s->s);
    return EVO_OK;
  });
}

evo_status evo_signal_inner(const evo_signal* a, const evo_signal* b, double* re, double* im) {
  if (!a || !b) return null_arg("signal");
  return guarded([&] {
    const evo::Complex z = evo::inner_nu(a->s, b->s);
    if (re) *re = z.real();
    if (im) *im = z.imag();
    return EVO_OK;
  });
}

evo_status evo_signal_antiderivative(const evo_signal* s, evo_signal** out) {
  if (!s) return null_arg("signal");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new evo_signal{evo::antiderivative(s->s)};
    return EVO_OK;
  });
}

evo_status evo_signal_derivative(const evo_signal* s, evo_signal** out) {
  if (!s) return null_arg("signal");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new evo_signal{evo::derivative(s->s)};
    return EVO_OK;
  });
}

evo_status evo_signal_picard_sin(const evo_signal* f, double tol, evo_signal** out) {
  if (!f) return null_arg("signal");
  if (!out) return null_arg("out");
  return guarded([&] {
    evo::require(f->s.dim() == 1, evo::ErrorCode::DimMismatch, "picard_sin expects a scalar signal");
    const auto F = [](const evo::CVector& u) { return evo::CVector(u.array().sin()); };
    *out = new evo_signal{evo::picard_solve(F, 1.0, f->s, tol)};
    return EVO_OK;
  });
}

void evo_signal_destroy(evo_signal* s) { delete s; }

evo_status evo_run_config(const char* path, const char* out_base, int verbose, evo_report** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const evo::ExperimentConfig cfg = evo::ExperimentConfig::load(path);
    std::optional<std::string> base;
    if (out_base) base = out_base;
    return finish_run(evo::run_and_write(cfg, base, verbose ? &std::cerr : nullptr), out);
  });
}

evo_status evo_run_config_text(const char* text, const char* out_base, int verbose, evo_report** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const evo::ExperimentConfig cfg = evo::ExperimentConfig::parse(text, "<text>");
    std::ostream* log = verbose ? &std::cerr : nullptr;
    if (out_base) return finish_run(evo::run_and_write(cfg, std::string(out_base), log), out);
    evo::RunResult r;
    r.report = evo::run_experiment(cfg, log);
    r.expect_fail = cfg.expect_fail;
    r.ok = r.report.passed() != cfg.expect_fail;
    return finish_run(std::move(r), out);
  });
}

const char* evo_report_experiment(const evo_report* r) { return r ? r->experiment.c_str() : ""; }
int evo_report_passed(const evo_report* r) { return r && r->report.passed() ? 1 : 0; }
int evo_report_ok(const evo_report* r) { return r && r->ok ? 1 : 0; }
double evo_report_runtime(const evo_report* r) { return r ? r->report.runtime_seconds() : 0.0; }
const char* evo_report_csv(const evo_report* r) { return r ? r->csv.c_str() : ""; }
const char* evo_report_json(const evo_report* r) { return r ? r->json.c_str() : ""; }
const char* evo_report_failures(const evo_report* r) { return r ? r->failures.c_str() : ""; }
const char* evo_report_csv_path(const evo_report* r) { return r ? r->csv_path.c_str() : ""; }
const char* evo_report_json_path(const evo_report* r) { return r ? r->json_path.c_str() : ""; }
void evo_report_destroy(evo_report* r) { delete r; }

evo_status evo_run_suite(const char* dir, const char* out_dir, int verbose, evo_suite** out) {
  if (!dir) return null_arg("dir");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    std::optional<std::string> od;
    if (out_dir) od = out_dir;
    const evo::SuiteResult s = evo::suite_all(dir, od, verbose ? &std::cerr : nullptr);
    auto* h = new evo_suite;
    h->ok = s.ok;
    h->json = s.json;
    h->json_path = s.json_path;
    size_t run = 0;
    for (const auto& name : s.configs) {
      evo_suite::Entry e;
      e.name = name;
      const auto err = s.errors.find(name);
      if (err != s.errors.end()) {
        e.failures = err->second + "\n";
      } else {
        const auto& r = s.runs.at(run++);
        e.ok = r.ok;
        if (!r.ok)
          e.failures = r.expect_fail ? std::string("expected failure but the run passed\n") : join(r.report.failures());
      }
      h->entries.push_back(std::move(e));
    }
    *out = h;
    if (!s.ok) {
      g_last_error = "suite has configs that are not ok";
      return EVO_ERR_VERDICT;
    }
    return EVO_OK;
  });
}

int evo_suite_ok(const evo_suite* s) { return s && s->ok ? 1 : 0; }
size_t evo_suite_count(const evo_suite* s) { return s ? s->entries.size() : 0; }

evo_status evo_suite_entry(const evo_suite* s, size_t i, const char** name, int* ok, const char** failures) {
  if (!s) return null_arg("suite");
  if (i >= s->entries.size()) {
    g_last_error = "suite entry index out of range";
    return EVO_ERR_INVALID_ARGUMENT;
  }
  const auto& e = s->entries[i];
  if (name) *name = e.name.c_str();
  if (ok) *ok = e.ok ? 1 : 0;
  if (failures) *failures = e.failures.c_str();
  return EVO_OK;
}

const char* evo_suite_json(const evo_suite* s) { return s ? s->json.c_str() : ""; }
const char* evo_suite_json_path(const evo_suite* s) { return s ? s->json_path.c_str() : ""; }
void evo_suite_destroy(evo_suite* s) { delete s; }

}  // extern "C"
