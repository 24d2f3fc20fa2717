#include "teleop/model_io.hpp"

#include <fstream>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd json_matrix(const json& j, const char* name) {
  if (!j.is_array()) throw ContractViolation(std::string("model file: ") + name + " is not a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ContractViolation(std::string("model file: ") + name + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd json_vector(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json fit_json(const FitReport& fit) {
  json f;
  f["label"] = fit.model_label;
  json pct = json::array();
  for (const auto& v : fit.fit_percent) pct.push_back(v ? json(*v) : json(nullptr));
  f["fit_percent"] = pct;
  f["mse"] = fit.mse;
  return f;
}

FitReport json_fit(const json& j) {
  FitReport fit;
  fit.model_label = j.at("label").get<std::string>();
  for (const auto& v : j.at("fit_percent")) {
    fit.fit_percent.push_back(v.is_null() ? FitValue{} : FitValue{v.get<double>()});
  }
  fit.mse = j.at("mse").get<std::vector<double>>();
  return fit;
}

}  // namespace

ModelFile model_from_arx(const ArxModel& arx, const ResidualNoise& noise,
                         std::optional<FitReport> fit) {
  ModelFile mf;
  mf.arx = arx;
  mf.noise = noise;
  mf.fit = std::move(fit);
  mf.system = to_system_model(arx, noise);
  mf.input_names = arx.input_names;
  mf.output_names = arx.output_names;
  return mf;
}

nlohmann::json to_json(const ModelFile& model) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelFormatVersion;
  j["dt"] = model.system.dt;
  j["input_names"] = model.input_names;
  j["output_names"] = model.output_names;
  if (model.arx) {
    const ArxModel& arx = *model.arx;
    j["kind"] = "arx";
    j["trial_id"] = arx.trial_id;
    j["orders"] = {{"na", arx.orders.na}, {"nb", arx.orders.nb}, {"nk", arx.orders.nk}};
    json a = json::array();
    json b = json::array();
    for (std::size_t o = 0; o < arx.a.size(); ++o) {
      a.push_back(vector_json(arx.a[o]));
      b.push_back(matrix_json(arx.b[o]));
    }
    j["a"] = a;
    j["b"] = b;
    if (!model.noise) throw ContractViolation("ARX model file needs noise tuning");
    j["noise"] = {{"q", model.noise->q}, {"r", vector_json(model.noise->r)}};
  } else {
    j["kind"] = "state_space";
    j["a"] = matrix_json(model.system.a);
    j["b"] = matrix_json(model.system.b);
    j["h"] = matrix_json(model.system.h);
    j["q"] = matrix_json(model.system.q);
    j["r"] = matrix_json(model.system.r);
  }
  if (model.fit) j["fit"] = fit_json(*model.fit);
  return j;
}

ModelFile model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw ContractViolation("not a model file (format field)");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ContractViolation("unsupported model file version " + std::to_string(version));
    }
    ModelFile mf;
    mf.input_names = j.at("input_names").get<std::vector<std::string>>();
    mf.output_names = j.at("output_names").get<std::vector<std::string>>();
    const double dt = j.at("dt").get<double>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "arx") {
      ArxModel arx;
      arx.dt = dt;
      arx.trial_id = j.value("trial_id", std::string{});
      arx.orders = {j.at("orders").at("na").get<int>(), j.at("orders").at("nb").get<int>(),
                    j.at("orders").at("nk").get<int>()};
      for (const auto& a : j.at("a")) arx.a.push_back(json_vector(a));
      for (const auto& b : j.at("b")) arx.b.push_back(json_matrix(b, "b"));
      arx.input_names = mf.input_names;
      arx.output_names = mf.output_names;
      ResidualNoise noise;
      noise.q = j.at("noise").at("q").get<double>();
      noise.r = json_vector(j.at("noise").at("r"));
      std::optional<FitReport> fit;
      if (j.contains("fit")) fit = json_fit(j.at("fit"));
      ModelFile out = model_from_arx(arx, noise, std::move(fit));
      return out;
    }
    if (kind == "state_space") {
      mf.system.dt = dt;
      mf.system.a = json_matrix(j.at("a"), "a");
      mf.system.b = json_matrix(j.at("b"), "b");
      mf.system.h = json_matrix(j.at("h"), "h");
      mf.system.q = json_matrix(j.at("q"), "q");
      mf.system.r = json_matrix(j.at("r"), "r");
      mf.system.validate();
      if (j.contains("fit")) mf.fit = json_fit(j.at("fit"));
      return mf;
    }
    throw ContractViolation("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path);
  if (!out) throw ContractViolation("cannot write model file " + path.string());
  out << to_json(model).dump(2) << '\n';
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open model file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ContractViolation(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace teleop
