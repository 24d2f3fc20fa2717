#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "teleop/arx.hpp"
#include "teleop/filter.hpp"

namespace teleop {

inline constexpr const char* kModelFormat = "teleop-kf-model";
inline constexpr int kModelFormatVersion = 1;

/// Contents of a model file. Either an identified ARX model (with its
/// noise tuning) or a plain state-space model; `system` is always filled
/// after loading.
struct ModelFile {
  std::optional<ArxModel> arx;
  std::optional<ResidualNoise> noise;
  std::optional<FitReport> fit;
  SystemModel system;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
};

ModelFile model_from_arx(const ArxModel& arx, const ResidualNoise& noise,
                         std::optional<FitReport> fit = std::nullopt);

nlohmann::json to_json(const ModelFile& model);
ModelFile model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace teleop
