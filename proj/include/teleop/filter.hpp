#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace teleop {

/// Discrete LTI model x[k] = A x[k-1] + B u[k-1] + w, z[k] = H x[k] + v,
/// with w ~ N(0, Q) and v ~ N(0, R).
struct SystemModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd h;
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;
  double dt = 1.0 / 30.0;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }
  Eigen::Index outputs() const { return h.rows(); }

  /// Throws ContractViolation on inconsistent shapes, asymmetric
  /// covariances or dt <= 0.
  void validate() const;
};

struct StateEstimate {
  Eigen::VectorXd x;
  Eigen::MatrixXd p;
  long k = 0;
};

/// Innovation z - H x⁻ and its covariance H P⁻ Hᵀ + R.
struct Innovation {
  Eigen::VectorXd residual;
  Eigen::MatrixXd covariance;

  /// rᵀ S⁻¹ r, evaluated through a Cholesky solve.
  double normalized_squared() const;
};

/// Symmetrizes in place and clips eigenvalues in [-1e-9, 0) to zero.
void condition_covariance(Eigen::MatrixXd& p);

/// Largest |P - Pᵀ| entry.
double asymmetry(const Eigen::MatrixXd& p);

double min_eigenvalue(const Eigen::MatrixXd& p);

StateEstimate predict(const StateEstimate& est, const SystemModel& model,
                      const Eigen::VectorXd& u);

Innovation innovation(const StateEstimate& prior, const SystemModel& model,
                      const Eigen::VectorXd& z);

/// Vector measurement update. The gain is obtained from an LLT solve of the
/// innovation covariance.
StateEstimate update_joint(const StateEstimate& prior, const SystemModel& model,
                           const Eigen::VectorXd& z);

/// Row-by-row scalar update; each row starts from the previous row's
/// output. Requires diagonal R.
StateEstimate update_sequential(const StateEstimate& prior,
                                const SystemModel& model,
                                const Eigen::VectorXd& z);

/// x̂₀ = H⁺ z₀ (zeros without an observation), P₀ = 10·I.
StateEstimate initial_estimate(const SystemModel& model,
                               const std::optional<Eigen::VectorXd>& first_observation);

inline constexpr double kInitialCovarianceScale = 10.0;

/// Predict with inputs[i], then update sequentially when observations[i] is
/// present. When `innovations` is given, the innovation of every update is
/// appended to it.
std::vector<StateEstimate> run_filter(
    const SystemModel& model, const StateEstimate& init,
    const std::vector<Eigen::VectorXd>& inputs,
    const std::vector<std::optional<Eigen::VectorXd>>& observations,
    std::vector<Innovation>* innovations = nullptr);

}  // namespace teleop
