#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "teleop/scenario.hpp"

namespace teleop {

/// One network setting, listed in the same column order as the results
/// table: jitter, delay, loss.
struct NetworkPoint {
  double jitter_ms = 0.0;
  double delay_ms = 0.0;
  double loss = 0.0;

  bool operator==(const NetworkPoint&) const = default;
};

/// Cartesian product, delay-major then jitter then loss.
std::vector<NetworkPoint> grid_product(const std::vector<double>& delays_ms,
                                       const std::vector<double>& jitters_ms,
                                       const std::vector<double>& losses);

/// The seven published (jitter, delay, loss) settings.
std::vector<NetworkPoint> table1_points();

struct SweepSpec {
  std::vector<NetworkPoint> points;
  int seeds = 30;
  std::uint64_t base_seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Run i of every point uses seed base_seed + i.
  std::vector<std::uint64_t> seed_list() const;
};

struct RunRecord {
  NetworkPoint point;
  std::uint64_t seed = 0;
  std::optional<ScenarioResult> result;
  std::string error;
};

struct AggregateRow {
  NetworkPoint point;
  std::vector<double> mse_mean;
  std::vector<FitValue> est_mean;
  FitValue est_aggregate_mean;
  double est_aggregate_std = 0.0;  // sample standard deviation over runs
  double loss_realized_mean = 0.0;
  std::size_t runs = 0;    // attempted, including failed ones
  std::size_t failed = 0;
};

struct SweepResult {
  std::vector<RunRecord> runs;  // ordered by (point, seed)
  std::vector<AggregateRow> rows;

  std::size_t failures() const;
};

/// Runs every (point, seed) pair, in parallel when threads allow. Failures
/// are recorded per run and do not stop the sweep.
SweepResult run_sweep(const SystemModel& model, const TrajectorySet& data,
                      const SweepSpec& spec);

AggregateRow aggregate_runs(const NetworkPoint& point, const std::vector<RunRecord>& runs);

/// Provenance lines embedded at the top of every report.
struct ReportHeader {
  std::string tool_version;
  std::string config_json;  // canonical config, single line
  std::string config_hash;
  std::string rng_algorithm;
  std::vector<std::uint64_t> seeds;
};

void write_runs_csv(std::ostream& out, const SweepResult& sweep,
                    const std::vector<std::string>& channels, const ReportHeader& header);
void write_aggregate_csv(std::ostream& out, const SweepResult& sweep,
                         const std::vector<std::string>& channels,
                         const ReportHeader& header);
/// Fixed-width text table with the published column order.
void write_table(std::ostream& out, const SweepResult& sweep);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Orders settings by loss probability first, jitter second.
std::vector<double> severity_rank(const std::vector<NetworkPoint>& points);

}  // namespace teleop
