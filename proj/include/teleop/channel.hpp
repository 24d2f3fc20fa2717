#pragma once

#include <cstddef>
#include <cstdint>
#include <map>

#include <Eigen/Dense>

#include "teleop/rng.hpp"

namespace teleop {

enum class ChannelMode {
  /// Delayed index plus hold-last-value loss (operational model).
  kIndexHold,
  /// Adds n_d + g·n_j + n_p to every component of the current sample. Only
  /// meant for exercising the additive deviation form in tests.
  kAdditiveBias,
};

struct NetworkConfig {
  double delay_ms = 0.0;   // n_d
  double jitter_ms = 0.0;  // n_j, standard deviation
  double loss = 0.0;       // n_p
  std::uint64_t seed = 0;
  ChannelMode mode = ChannelMode::kIndexHold;

  /// Throws ContractViolation when any parameter is out of range.
  void validate() const;
};

struct ChannelStats {
  std::size_t steps = 0;
  std::size_t lost = 0;
  /// (k - delivered index) -> count, delivered packets only.
  std::map<long, std::size_t> delay_histogram;

  double realized_loss() const {
    return steps == 0 ? 0.0 : static_cast<double>(lost) / static_cast<double>(steps);
  }
  double mean_delay_samples() const;

  bool operator==(const ChannelStats&) const = default;
};

/// Index of the sample a packet sent at step `k` carries:
/// k - round(n_d/dt + g·n_j/dt), clamped below at 0 (steps are 0-based).
/// Consumes one normal draw from `rng`. The result may exceed `k` when the
/// draw is negative; Channel::observe clamps it.
long delayed_index(long k, const NetworkConfig& cfg, double dt, Rng& rng);

/// Single-owner impaired observation stream over a fixed truth sequence.
class Channel {
 public:
  /// prev_y starts as the first truth sample.
  Channel(const NetworkConfig& cfg, double dt, const Eigen::MatrixXd& truth);

  /// Observation delivered at step k (1 <= k < rows). Draw order per step:
  /// jitter normal, then loss uniform.
  Eigen::VectorXd observe(long k);

  const ChannelStats& stats() const { return stats_; }
  const Eigen::VectorXd& previous() const { return prev_y_; }

 private:
  NetworkConfig cfg_;
  double dt_;
  const Eigen::MatrixXd& truth_;
  Rng rng_;
  Eigen::VectorXd prev_y_;
  ChannelStats stats_;
};

}  // namespace teleop
