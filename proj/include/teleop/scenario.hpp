#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "teleop/channel.hpp"
#include "teleop/filter.hpp"
#include "teleop/metrics.hpp"
#include "teleop/trajectory.hpp"

namespace teleop {

struct Scenario {
  SystemModel model;
  NetworkConfig network;
  TrajectorySet data;  // MTM inputs and the unimpaired PSM stream
  /// Defaults to initial_estimate() on the first PSM sample.
  std::optional<StateEstimate> init;

  /// Model and data dimensions agree; throws ContractViolation otherwise.
  void validate() const;
};

struct ScenarioResult {
  Eigen::MatrixXd z_est;      // N x p, H x̂ per step
  Eigen::MatrixXd delivered;  // N x p, observation handed to the filter
  std::vector<double> mse;
  std::vector<FitValue> est_percent;
  FitValue aggregate;
  ChannelStats channel_stats;
  std::vector<std::uint64_t> seeds;
  double runtime_ms = 0.0;
  // Covariance health over every filter step.
  double max_asymmetry = 0.0;
  double min_eigenvalue = 0.0;

  /// Equality of everything except runtime.
  bool same_outcome(const ScenarioResult& other) const;
};

/// Closed loop over steps k = 1..N-1: impaired observation, predict with
/// u[k-1], sequential update. Metrics are taken against the unimpaired
/// outputs. Library errors are rethrown as StepError.
ScenarioResult run_scenario(const Scenario& s);

}  // namespace teleop
