#include "teleop/scenario.hpp"

#include <algorithm>
#include <chrono>

#include "teleop/errors.hpp"

namespace teleop {

void Scenario::validate() const {
  model.validate();
  network.validate();
  data.validate();
  if (data.inputs.cols() != model.inputs()) {
    throw ContractViolation("model expects " + std::to_string(model.inputs()) +
                            " input channels but data has " +
                            std::to_string(data.inputs.cols()));
  }
  if (data.outputs.cols() != model.outputs()) {
    throw ContractViolation("model expects " + std::to_string(model.outputs()) +
                            " output channels but data has " +
                            std::to_string(data.outputs.cols()));
  }
  if (data.samples() < 2) throw ContractViolation("scenario needs at least 2 samples");
}

bool ScenarioResult::same_outcome(const ScenarioResult& o) const {
  return z_est == o.z_est && delivered == o.delivered && mse == o.mse &&
         est_percent == o.est_percent && aggregate == o.aggregate &&
         channel_stats == o.channel_stats && seeds == o.seeds &&
         max_asymmetry == o.max_asymmetry && min_eigenvalue == o.min_eigenvalue;
}

ScenarioResult run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  s.validate();
  const Eigen::Index n = s.data.samples();
  const Eigen::MatrixXd& truth = s.data.outputs;

  ScenarioResult result;
  result.seeds = {s.network.seed};
  result.z_est.resize(n, s.model.outputs());
  result.delivered.resize(n, s.model.outputs());

  StateEstimate est = s.init ? *s.init
                             : initial_estimate(s.model, Eigen::VectorXd(truth.row(0)));
  Channel channel(s.network, s.model.dt, truth);
  result.delivered.row(0) = channel.previous().transpose();
  result.z_est.row(0) = (s.model.h * est.x).transpose();
  result.max_asymmetry = asymmetry(est.p);
  result.min_eigenvalue = min_eigenvalue(est.p);

  for (Eigen::Index k = 1; k < n; ++k) {
    try {
      const Eigen::VectorXd y = channel.observe(k);
      const StateEstimate prior =
          predict(est, s.model, s.data.inputs.row(k - 1).transpose());
      est = update_sequential(prior, s.model, y);
      result.delivered.row(k) = y.transpose();
      result.z_est.row(k) = (s.model.h * est.x).transpose();
      result.max_asymmetry = std::max(
          {result.max_asymmetry, asymmetry(prior.p), asymmetry(est.p)});
      result.min_eigenvalue = std::min(
          {result.min_eigenvalue, min_eigenvalue(prior.p), min_eigenvalue(est.p)});
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw StepError("step " + std::to_string(k) + ": " + e.what(),
                      static_cast<std::size_t>(k));
    }
  }

  result.mse = mse(truth, result.z_est);
  result.est_percent = fit_percent(truth, result.z_est);
  result.aggregate = aggregate_fit(result.est_percent);
  result.channel_stats = channel.stats();
  result.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

}  // namespace teleop
