#pragma once

#include <iosfwd>

#include "teleop/run_config.hpp"

namespace teleop {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitScenarioFailure = 1, kExitUsage = 2 };

/// Order sweep on data/holdout; writes <out>/model.json and
/// <out>/identify_fit.csv and prints the ranked fit table.
int cmd_identify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One scenario; writes <out>/trace.csv (time, truth, delivered, estimate
/// per channel) and prints the metrics.
int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Network grid x seeds; writes <out>/sweep_runs.csv,
/// <out>/sweep_aggregate.csv and <out>/sweep_table.txt.
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Synthetic dataset; writes <out>/synthetic.txt, its ground-truth
/// <out>/synthetic_model.json and optionally <out>/synthetic_holdout.txt.
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace teleop
