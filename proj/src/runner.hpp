#pragma once

#include <string>

#include "config.hpp"

// Run coordination: output layout runs/<run_id>/{manifest.json, config.json,
// partial.json, report.json, *.csv}, unit-level checkpointing, and resume.
// Everything except the manifest (which carries wall-clock timestamps) is
// byte-identical for a given (config, seed) at any thread count.

namespace rmt {

struct RunOptions {
  std::string out_dir = "runs";
  std::string format = "csv";  // "csv" writes tables + report, "json" report only
  int threads = 0;             // 0 = hardware concurrency
  int halt_after_units = -1;   // testing hook: stop early, exit interrupted
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 usage/config, 2 invariant violation, 3 interrupted
  std::string run_dir;
  std::string message;
  json report;
  int violations = 0;
};

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;
constexpr int kExitInterrupted = 3;

// Builds the effective config for a subcommand: driver defaults, then the
// optional config file, then explicit overrides.
Config build_config(const std::string& subcommand, const std::string& config_path,
                    const json& overrides);

RunOutcome run_experiment(const std::string& subcommand, const Config& cfg,
                          const RunOptions& options);

RunOutcome resume_run(const std::string& manifest_path, int threads = 0);

std::string version_string();

}  // namespace rmt
