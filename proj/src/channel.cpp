#include "teleop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "teleop/errors.hpp"

namespace teleop {

void NetworkConfig::validate() const {
  if (!(delay_ms >= 0.0)) throw ContractViolation("network delay must be >= 0");
  if (!(jitter_ms >= 0.0)) throw ContractViolation("network jitter must be >= 0");
  if (!(loss >= 0.0 && loss <= 1.0)) {
    throw ContractViolation("packet loss probability must lie in [0, 1]");
  }
}

double ChannelStats::mean_delay_samples() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [delay, n] : delay_histogram) {
    sum += static_cast<double>(delay) * static_cast<double>(n);
    count += n;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

long delayed_index(long k, const NetworkConfig& cfg, double dt, Rng& rng) {
  const double g = rng.normal();
  const double offset = (cfg.delay_ms * 1e-3) / dt + g * (cfg.jitter_ms * 1e-3) / dt;
  return std::max(0L, k - std::lround(offset));
}

Channel::Channel(const NetworkConfig& cfg, double dt, const Eigen::MatrixXd& truth)
    : cfg_(cfg), dt_(dt), truth_(truth), rng_(cfg.seed) {
  cfg_.validate();
  if (!(dt > 0.0)) throw ContractViolation("channel dt must be positive");
  if (truth.rows() == 0) throw ContractViolation("channel truth sequence is empty");
  prev_y_ = truth.row(0).transpose();
}

Eigen::VectorXd Channel::observe(long k) {
  if (k < 1 || k >= truth_.rows()) {
    throw ContractViolation("channel step " + std::to_string(k) + " outside [1, " +
                            std::to_string(truth_.rows() - 1) + "]");
  }
  ++stats_.steps;

  if (cfg_.mode == ChannelMode::kAdditiveBias) {
    const double g = rng_.normal();
    rng_.uniform();
    const double bias = cfg_.delay_ms + g * cfg_.jitter_ms + cfg_.loss;
    prev_y_ = truth_.row(k).transpose().array() + bias;
    ++stats_.delay_histogram[0];
    return prev_y_;
  }

  const long index = std::min(delayed_index(k, cfg_, dt_, rng_), k);
  const bool delivered = rng_.uniform() > cfg_.loss;
  if (delivered) {
    prev_y_ = truth_.row(index).transpose();
    ++stats_.delay_histogram[k - index];
  } else {
    ++stats_.lost;
  }
  return prev_y_;
}

}  // namespace teleop
