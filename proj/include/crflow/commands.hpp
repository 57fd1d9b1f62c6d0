// Subcommand drivers. Each writes its artifacts under cfg.output together with
// manifest.txt and config.ini, and returns the process exit code.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crflow/config.hpp"
#include "crflow/flow.hpp"

namespace crflow {

enum ExitCode : int { exit_ok = 0, exit_verification = 1, exit_config = 2, exit_solver = 3 };

int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_normalize(const RunConfig& cfg, std::ostream& log);
int cmd_flow(const RunConfig& cfg, std::ostream& log);
int cmd_classical(const RunConfig& cfg, std::ostream& log);
int cmd_homogeneous(const RunConfig& cfg, std::ostream& log);
int cmd_project(const RunConfig& cfg, std::ostream& log);

/// Dispatches on cfg.subcommand and maps exceptions to exit codes, printing
/// the message (with line and field for configuration errors) to `log`.
int run_command(const RunConfig& cfg, std::ostream& log);

/// `count` random boxes, each spanning between a quarter and a half of every
/// axis, placed without wrap-around.
std::vector<IndexBox> random_boxes(const Grid& grid, int count, std::uint64_t seed);

/// The initial metric of a run: metric.input if set, else the preset.
MetricField initial_metric(const RunConfig& cfg);

/// 17 significant digits.
std::string csv_number(double v);

}  // namespace crflow
