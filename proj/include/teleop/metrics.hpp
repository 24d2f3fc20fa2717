#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace teleop {

/// Best-fit percentage of one channel; empty when the truth channel is
/// constant and the fit is undefined.
using FitValue = std::optional<double>;

/// Per column: 100·(1 − ‖y − ŷ‖₂ / ‖y − ȳ‖₂). Rows are samples; needs N >= 2.
std::vector<FitValue> fit_percent(const Eigen::MatrixXd& truth,
                                  const Eigen::MatrixXd& estimate);

/// Unweighted mean over the defined channels.
FitValue aggregate_fit(const std::vector<FitValue>& per_channel);

/// Per-column mean squared error; needs N >= 1.
std::vector<double> mse(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate);

}  // namespace teleop
