#pragma once

/// @file runner.hpp
/// @brief Experiment dispatch for the command line: runs one theory or the
/// verification suite and writes report.json, CSV series and a timing sidecar.

#include "collar/config.hpp"
#include "collar/report.hpp"

#include <string>
#include <utility>
#include <vector>

namespace collar {

struct RunOutcome {
  RunReport report;
  std::string report_path;
  int exit_code = 0;  // 0 pass, 1 failed check
};

/// Executes config.theory and writes all artifacts under output_dir.
/// Throws ConfigError (exit 2) or IoError (exit 3).
RunOutcome run_experiment(const RunConfig& config, const std::string& output_dir,
                          const std::string& check_filter = "");

/// Named output files (relative path, content) produced next to the report.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

/// Runs the experiment in memory; no filesystem access.
RunReport build_report(const RunConfig& config, const std::string& check_filter, Artifacts& files);

}  // namespace collar
