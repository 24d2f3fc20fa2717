#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "teleop/filter.hpp"
#include "teleop/metrics.hpp"
#include "teleop/trajectory.hpp"

namespace teleop {

struct ArxOrders {
  int na = 1;  // output lags
  int nb = 1;  // input lags
  int nk = 1;  // input dead time, samples

  int total() const { return na + nb + nk; }
  std::string label() const;
  bool operator==(const ArxOrders&) const = default;
};

/// Multi-output ARX built from independent MISO regressions:
///
///     y_o[t] = Σ_{i=1..na} a[o](i-1)·y_o[t-i] + Σ_in Σ_{j=0..nb-1} b[o](in, j)·u_in[t-nk-j]
struct ArxModel {
  ArxOrders orders;
  std::vector<Eigen::VectorXd> a;  // per output, length na
  std::vector<Eigen::MatrixXd> b;  // per output, n_inputs x nb
  double dt = kJigsawsDt;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::string trial_id;

  Eigen::Index n_outputs() const { return static_cast<Eigen::Index>(a.size()); }
  Eigen::Index n_inputs() const { return b.empty() ? 0 : b.front().rows(); }

  /// Throws ContractViolation when coefficient shapes disagree with orders.
  void validate() const;

  /// Every output channel's characteristic roots lie strictly inside the
  /// unit circle.
  bool is_stable() const;
  double spectral_radius() const;
};

struct FitReport {
  std::vector<FitValue> fit_percent;
  std::vector<double> mse;
  std::string model_label;

  FitValue aggregate() const { return aggregate_fit(fit_percent); }
};

/// Least-squares fit of every output channel. Identically zero regressor
/// columns get zero coefficients; any other rank deficiency throws
/// IllConditionedData.
ArxModel arx_fit(const TrajectorySet& data, const ArxOrders& orders);

/// Observable companion realization with max(na, nk+nb-1) states per
/// output, block diagonal across outputs; H picks each block's first state.
/// Q and R come back zero. Requires na >= 1 and nk >= 1.
SystemModel arx_to_ss(const ArxModel& model);

/// Free-run simulation. The first na rows are copied from `y_init`; inputs
/// before t = 0 are taken as zero.
Eigen::MatrixXd simulate_arx(const ArxModel& model, const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& y_init);

/// One-step-ahead predictor driven by measured outputs. Rows before na
/// repeat the measurement.
Eigen::MatrixXd predict_one_step(const ArxModel& model, const TrajectorySet& data);

/// Free-run simulation on the holdout inputs, scored after the na initial
/// samples. Refuses a holdout carrying the training trial id unless
/// `allow_same_trial` is set.
FitReport cross_validate(const ArxModel& model, const TrajectorySet& holdout,
                         bool allow_same_trial = false);

/// One-step residual variances on the training data.
struct ResidualNoise {
  double q = 0.0;         // process noise scale, Q = q·I
  Eigen::VectorXd r;      // per-output measurement variance, R = diag(r)
};

inline constexpr double kMinNoiseVariance = 1e-12;

ResidualNoise residual_noise(const ArxModel& model, const TrajectorySet& training);

/// arx_to_ss with Q = q·I and R = diag(r).
SystemModel to_system_model(const ArxModel& model, const ResidualNoise& noise);

struct OrderGrid {
  int na_min = 1, na_max = 4;
  int nb_min = 1, nb_max = 4;
  int nk_min = 1, nk_max = 2;

  std::vector<ArxOrders> enumerate() const;
};

struct OrderCandidate {
  ArxOrders orders;
  std::optional<ArxModel> model;
  FitReport report;
  std::string error;  // non-empty when fitting failed
};

/// Fits every order in the grid on `training`, scores each on `holdout` and
/// ranks by aggregate fit (rounded to 1e-6 %), then lowest total order.
/// Failed fits sort last.
std::vector<OrderCandidate> sweep_orders(const TrajectorySet& training,
                                         const TrajectorySet& holdout,
                                         const OrderGrid& grid,
                                         bool allow_same_trial = false);

}  // namespace teleop
