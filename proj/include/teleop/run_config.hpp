#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "teleop/arx.hpp"
#include "teleop/sweep.hpp"

namespace teleop {

inline constexpr const char* kToolVersion = TELEOP_VERSION;

/// Everything a CLI invocation needs. Loaded from a JSON config file and
/// then overridden by command-line flags.
struct RunConfig {
  std::string command;  // identify | run | sweep | synth

  std::string data;     // kinematics file (training data for identify)
  std::string holdout;  // identify: validation file
  std::string model;    // run/sweep: model file
  std::string layout;   // column layout descriptor; empty = shipped default
  std::string preset = "paper";
  std::vector<std::string> inputs;   // explicit selection overrides preset
  std::vector<std::string> outputs;
  std::optional<double> dt;
  std::string out = "out";

  // identify
  OrderGrid orders;

  // run
  double delay_ms = 0.0;
  double jitter_ms = 0.0;
  double loss = 0.0;
  std::uint64_t seed = 1;

  // sweep
  std::vector<double> delays_ms;
  std::vector<double> jitters_ms;
  std::vector<double> losses;
  std::vector<NetworkPoint> scenarios;  // used instead of the product when set
  int seeds = 30;
  std::uint64_t base_seed = 1;
  unsigned threads = 0;

  // noise overrides applied after loading a model
  std::optional<double> q;
  std::optional<double> r;

  // synth
  std::string generator = "mimo2";  // mimo2 | arx
  std::vector<double> arx_a{0.5};
  std::vector<double> arx_b{1.0};
  int arx_nk = 1;
  std::string excitation = "sines";  // sines | white
  double amplitude = 1.0;
  long samples = 2000;
  double process_noise = 1e-3;
  double measurement_noise = 1e-3;
  std::uint64_t synth_seed = 7;
  long holdout_samples = 0;  // > 0 also writes a holdout realization

  /// Usage-level checks (exit code 2 on failure): required paths exist,
  /// grid lists are non-empty.
  void validate() const;

  /// Network settings of a sweep.
  std::vector<NetworkPoint> sweep_points() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Config with output-only fields (out, threads) removed, dumped on one
/// line with sorted keys. This is what reports embed.
std::string canonical_config(const RunConfig& cfg);

/// FNV-1a 64 of the text, as 16 hex digits.
std::string config_hash(const std::string& canonical);

/// Reads the `# config=` line of a report back into a RunConfig.
RunConfig config_from_report(const std::filesystem::path& report);

}  // namespace teleop
