#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "teleop/arx.hpp"
#include "teleop/filter.hpp"
#include "teleop/rng.hpp"
#include "teleop/trajectory.hpp"

namespace teleop {

struct TruthTrace {
  Eigen::MatrixXd states;   // N x n
  Eigen::MatrixXd outputs;  // N x p
};

/// x[0] = x0, x[k] = A x[k-1] + B u[k-1] + w, y[k] = H x[k] + v with
/// w ~ N(0, Q), v ~ N(0, R). Per step the draws are n normals for w then p
/// normals for v.
TruthTrace simulate_truth(const SystemModel& model, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& x0, Rng& rng);

enum class Excitation { kWhiteNoise, kSumOfSines };

struct SyntheticSpec {
  /// ARX generators use the noise levels below (equation error and additive
  /// output noise). State-space generators draw w and v from the model's Q
  /// and R instead.
  std::variant<ArxModel, SystemModel> generator;
  Excitation excitation = Excitation::kSumOfSines;
  double input_amplitude = 1.0;
  Eigen::Index samples = 1000;
  double dt = kJigsawsDt;
  double process_noise_std = 0.0;
  double measurement_noise_std = 0.0;
  std::uint64_t seed = 0;
  bool allow_unstable = false;
  std::vector<std::string> input_names;   // defaults to u0, u1, ...
  std::vector<std::string> output_names;  // defaults to y0, y1, ...
  std::string trial_id = "synthetic";
};

/// Deterministic trajectory from a known generator.
TrajectorySet gen_synthetic(const SyntheticSpec& spec);

/// Excitation matrix (N x m). Sum-of-sines uses five components per channel
/// with frequencies in [0.05, 1.5] Hz and random phases.
Eigen::MatrixXd make_excitation(Excitation kind, Eigen::Index samples,
                                Eigen::Index channels, double amplitude, double dt,
                                Rng& rng);

/// Second-order MIMO ARX(2,2,1) generator shaped like the teleoperation
/// problem: six MTM inputs (right tool-tip position and velocity) driving
/// three PSM tool-tip coordinates. Channel names follow the kinematics
/// layout.
ArxModel mimo2_generator(double dt = kJigsawsDt);

}  // namespace teleop
