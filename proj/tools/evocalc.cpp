// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

// evocalc run <config> [--out BASE] [--verbose]
// evocalc suite <dir> [--out DIR] [--verbose]
//
// Exit status: 0 when the verdict matches expectation, 1 on a negative verdict,
// 2 on configuration or input errors, 3 on internal failures.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "evocalc/evocalc.h"

namespace {

int exit_code(evo_status s) {
  switch (s) {
    case EVO_OK: return 0;
    case EVO_ERR_VERDICT: return 1;
    case EVO_ERR_INTERNAL: return 3;
    default: return 2;
  }
}

void print_indented(const char* text) {
  std::string line;
  for (const char* p = text; *p; ++p) {
    if (*p == '\n') {
      std::fprintf(stderr, "  %s\n", line.c_str());
      line.clear();
    } else {
      line += *p;
    }
  }
  if (!line.empty()) std::fprintf(stderr, "  %s\n", line.c_str());
}

int run_one(const std::string& path, const std::string& out, bool verbose) {
  evo_report* r = nullptr;
  const evo_status s = evo_run_config(path.c_str(), out.empty() ? nullptr : out.c_str(), verbose ? 1 : 0, &r);
  if (!r) {
    std::fprintf(stderr, "evocalc: %s: %s\n", evo_status_name(s), evo_last_error());
    return exit_code(s);
  }
  std::printf("%s: verdict %s, %s (%.2f s)\n", evo_report_experiment(r), evo_report_passed(r) ? "pass" : "fail",
              evo_report_ok(r) ? "ok" : "NOT OK", evo_report_runtime(r));
  std::printf("  csv  %s\n  json %s\n", evo_report_csv_path(r), evo_report_json_path(r));
  if (!evo_report_passed(r)) print_indented(evo_report_failures(r));
  evo_report_destroy(r);
  return exit_code(s);
}

int run_suite(const std::string& dir, const std::string& out, bool verbose) {
  evo_suite* su = nullptr;
  const evo_status s = evo_run_suite(dir.c_str(), out.empty() ? nullptr : out.c_str(), verbose ? 1 : 0, &su);
  if (!su) {
    std::fprintf(stderr, "evocalc: %s: %s\n", evo_status_name(s), evo_last_error());
    return exit_code(s);
  }
  for (size_t i = 0; i < evo_suite_count(su); ++i) {
    const char* name = nullptr;
    const char* failures = nullptr;
    int ok = 0;
    evo_suite_entry(su, i, &name, &ok, &failures);
    std::printf("%-36s %s\n", name, ok ? "ok" : "NOT OK");
    if (!ok) print_indented(failures);
  }
  std::printf("suite: %s (%s)\n", evo_suite_ok(su) ? "ok" : "NOT OK", evo_suite_json_path(su));
  evo_suite_destroy(su);
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evocalc: evolutionary equations in exponentially weighted time"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(evo_version()));

  std::string config, out_run, dir, out_suite;
  bool verbose = false;
  CLI::App* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_run, "output base path (writes BASE.csv and BASE.json)");
  run->add_flag("-v,--verbose", verbose, "log progress to stderr");

  CLI::App* suite = app.add_subcommand("suite", "run every *.conf in a directory");
  suite->add_option("dir", dir, "config directory")->required()->check(CLI::ExistingDirectory);
  suite->add_option("--out", out_suite, "report directory (default DIR/reports)");
  suite->add_flag("-v,--verbose", verbose, "log progress to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*run) return run_one(config, out_run, verbose);
  return run_suite(dir, out_suite, verbose);
}
