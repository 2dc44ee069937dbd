#pragma once

#include <filesystem>
#include <string>

#include "lbmo/config.hpp"

namespace lbmo {

/// Outcome of one scenario; `verdict` is "pass", "fail", "skip" or "abort".
struct ScenarioResult {
  std::string scenario;
  std::string verdict;
  Json report;
  std::filesystem::path out_dir;
};

/// Runs the configured scenario, writing run.json, its CSV tables and
/// report.json under cfg.out_dir. A solver abort leaves the partial CSV and
/// a report with verdict "abort" behind before the SolverAbort propagates.
ScenarioResult run_scenario(const ExperimentConfig& cfg);

/// Rebuilds a scenario's report (verdicts included) from run.json and the
/// CSV files in `dir` alone.
Json recompute_report(const std::filesystem::path& dir);

/// Exit-code mapping used by the CLI: pass/skip 0, fail 1.
int verdict_exit_code(const std::string& verdict);

}  // namespace lbmo
