// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evocalc/report.hpp"
#include "evocalc/signal.hpp"

namespace evo {

/// Plain-text experiment description.
///
///   # comment
///   experiment = dbf
///   dt = 0.00048828125
///   scales = 8, 16, 32, 64
///   tol.final = 0.02
///   param.oracle = harmonic
///
/// Grid keys t0, dt, n, t_end, nu and scales override the experiment defaults.
/// expect = fail marks a negative control whose verdict is inverted.
struct ExperimentConfig {
  std::string experiment;
  std::optional<double> t0, dt, t_end, nu;
  std::optional<Index> n;
  std::optional<std::vector<double>> scales;
  std::uint64_t seed = 42;
  std::string output;
  bool expect_fail = false;
  std::map<std::string, double> tol;
  std::map<std::string, std::string> param;
  /// Directory of the config file, used to resolve relative paths.
  std::string base_dir = ".";

  static ExperimentConfig parse(const std::string& text, const std::string& origin = "<config>");
  static ExperimentConfig load(const std::string& path);
};

struct ExperimentDefaults {
  double t0 = 0.0;
  double t_end = 30.0;
  double dt = 0.01;
  double nu = 1.0;
  std::vector<double> scales;
};

const std::vector<std::string>& experiment_names();
ExperimentDefaults experiment_defaults(const std::string& name);

/// Resolved grid, scales and lookups handed to a runner.
struct ExperimentContext {
  TimeGrid grid;
  std::vector<double> scales;
  std::uint64_t seed = 42;
  ExperimentConfig config;
  std::ostream* log = nullptr;

  double tol(const std::string& key, double fallback) const;
  double param(const std::string& key, double fallback) const;
  std::string param_str(const std::string& key, const std::string& fallback) const;
  std::vector<double> param_list(const std::string& key, const std::vector<double>& fallback) const;
  void note(const std::string& msg) const;
};

ExperimentContext make_context(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Runners; each returns a report whose passed() is the experiment verdict.
ConvergenceReport spectrum_experiment(const ExperimentContext& ctx);
ConvergenceReport ode_block_experiment(const ExperimentContext& ctx);
ConvergenceReport picard_experiment(const ExperimentContext& ctx);
ConvergenceReport transfer_experiment(const ExperimentContext& ctx);
ConvergenceReport causality_suite_experiment(const ExperimentContext& ctx);
/// param.family = product (k = 2 product of means) or sine (weak/strong separation).
ConvergenceReport timprod_experiment(const ExperimentContext& ctx);
/// param.oracle = harmonic or arithmetic.
ConvergenceReport dbf_experiment(const ExperimentContext& ctx);
ConvergenceReport memory_kernel_experiment(const ExperimentContext& ctx);
ConvergenceReport eddy_current_experiment(const ExperimentContext& ctx);
ConvergenceReport heat_experiment(const ExperimentContext& ctx);
ConvergenceReport wave_g_convergence_experiment(const ExperimentContext& ctx);
ConvergenceReport funid_experiment(const ExperimentContext& ctx);

/// Dispatches on cfg.experiment and records the runtime.
ConvergenceReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct RunResult {
  ConvergenceReport report;
  bool expect_fail = false;
  /// Verdict after applying expect_fail.
  bool ok = false;
  std::string csv_path;
  std::string json_path;
};

/// Runs and writes <base>.csv and <base>.json.  base defaults to cfg.output, then to the experiment name.
RunResult run_and_write(const ExperimentConfig& cfg, const std::optional<std::string>& out_base,
                        std::ostream* log = nullptr);

struct SuiteResult {
  std::vector<std::string> configs;
  std::vector<RunResult> runs;
  /// Per-config error text for configs that failed to parse or run.
  std::map<std::string, std::string> errors;
  bool ok = false;
  std::string json;
  std::string json_path;
};

/// Runs every *.conf in dir in filename order; reports go to out_dir (default dir/reports).
SuiteResult suite_all(const std::string& dir, const std::optional<std::string>& out_dir, std::ostream* log = nullptr);

/// Causal rectangle-rule convolution y_k = dt sum_{j<=k} kernel[k-j] f_j, row by row via FFT.
Signal causal_convolution(const Eigen::VectorXd& kernel, const Signal& f);

}  // namespace evo
