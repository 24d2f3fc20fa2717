#include "teleop/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

using nlohmann::json;

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ContractViolation(std::string("missing ") + what + " path");
  if (!std::filesystem::exists(path)) {
    throw ContractViolation(std::string(what) + " file not found: " + path);
  }
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& field) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    field.reset();
  } else {
    field = j.at(key).get<T>();
  }
}

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> commands{"identify", "run", "sweep", "synth"};
  if (!commands.count(command)) throw ContractViolation("unknown command '" + command + "'");
  if (!layout.empty()) require_file(layout, "layout");
  if (dt && !(*dt > 0.0)) throw ContractViolation("dt must be positive");
  if (command == "identify") {
    require_file(data, "training data");
    require_file(holdout, "holdout data");
    if (orders.enumerate().empty()) throw ContractViolation("ARX order grid is empty");
  } else if (command == "run") {
    require_file(model, "model");
    require_file(data, "data");
  } else if (command == "sweep") {
    require_file(model, "model");
    require_file(data, "data");
    if (scenarios.empty() && (delays_ms.empty() || jitters_ms.empty() || losses.empty())) {
      throw ContractViolation(
          "sweep grid is empty: give delays, jitters and losses, or explicit scenarios");
    }
    if (seeds < 1) throw ContractViolation("sweep needs at least one seed");
  } else if (command == "synth") {
    if (samples < 1) throw ContractViolation("synth needs samples >= 1");
    if (generator != "mimo2" && generator != "arx") {
      throw ContractViolation("unknown generator '" + generator + "'; use mimo2 or arx");
    }
    if (excitation != "sines" && excitation != "white") {
      throw ContractViolation("unknown excitation '" + excitation + "'; use sines or white");
    }
  }
}

std::vector<NetworkPoint> RunConfig::sweep_points() const {
  if (!scenarios.empty()) return scenarios;
  return grid_product(delays_ms, jitters_ms, losses);
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["data"] = c.data;
  j["holdout"] = c.holdout;
  j["model"] = c.model;
  j["layout"] = c.layout;
  j["preset"] = c.preset;
  j["inputs"] = c.inputs;
  j["outputs"] = c.outputs;
  j["dt"] = c.dt ? json(*c.dt) : json(nullptr);
  j["out"] = c.out;
  j["orders"] = {{"na_min", c.orders.na_min}, {"na_max", c.orders.na_max},
                 {"nb_min", c.orders.nb_min}, {"nb_max", c.orders.nb_max},
                 {"nk_min", c.orders.nk_min}, {"nk_max", c.orders.nk_max}};
  j["delay_ms"] = c.delay_ms;
  j["jitter_ms"] = c.jitter_ms;
  j["loss"] = c.loss;
  j["seed"] = c.seed;
  j["delays_ms"] = c.delays_ms;
  j["jitters_ms"] = c.jitters_ms;
  j["losses"] = c.losses;
  json sc = json::array();
  for (const auto& p : c.scenarios) {
    sc.push_back({{"jitter_ms", p.jitter_ms}, {"delay_ms", p.delay_ms}, {"loss", p.loss}});
  }
  j["scenarios"] = sc;
  j["seeds"] = c.seeds;
  j["base_seed"] = c.base_seed;
  j["threads"] = c.threads;
  j["q"] = c.q ? json(*c.q) : json(nullptr);
  j["r"] = c.r ? json(*c.r) : json(nullptr);
  j["generator"] = c.generator;
  j["arx_a"] = c.arx_a;
  j["arx_b"] = c.arx_b;
  j["arx_nk"] = c.arx_nk;
  j["excitation"] = c.excitation;
  j["amplitude"] = c.amplitude;
  j["samples"] = c.samples;
  j["process_noise"] = c.process_noise;
  j["measurement_noise"] = c.measurement_noise;
  j["synth_seed"] = c.synth_seed;
  j["holdout_samples"] = c.holdout_samples;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ContractViolation("config must be a JSON object");
  const json known = to_json(RunConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ContractViolation("unknown config key '" + key + "'");
  }
  try {
    read(j, "command", c.command);
    read(j, "data", c.data);
    read(j, "holdout", c.holdout);
    read(j, "model", c.model);
    read(j, "layout", c.layout);
    read(j, "preset", c.preset);
    read(j, "inputs", c.inputs);
    read(j, "outputs", c.outputs);
    read_opt(j, "dt", c.dt);
    read(j, "out", c.out);
    if (j.contains("orders")) {
      const json& o = j.at("orders");
      read(o, "na_min", c.orders.na_min);
      read(o, "na_max", c.orders.na_max);
      read(o, "nb_min", c.orders.nb_min);
      read(o, "nb_max", c.orders.nb_max);
      read(o, "nk_min", c.orders.nk_min);
      read(o, "nk_max", c.orders.nk_max);
    }
    read(j, "delay_ms", c.delay_ms);
    read(j, "jitter_ms", c.jitter_ms);
    read(j, "loss", c.loss);
    read(j, "seed", c.seed);
    read(j, "delays_ms", c.delays_ms);
    read(j, "jitters_ms", c.jitters_ms);
    read(j, "losses", c.losses);
    if (j.contains("scenarios")) {
      c.scenarios.clear();
      for (const auto& p : j.at("scenarios")) {
        c.scenarios.push_back({p.at("jitter_ms").get<double>(), p.at("delay_ms").get<double>(),
                               p.at("loss").get<double>()});
      }
    }
    read(j, "seeds", c.seeds);
    read(j, "base_seed", c.base_seed);
    read(j, "threads", c.threads);
    read_opt(j, "q", c.q);
    read_opt(j, "r", c.r);
    read(j, "generator", c.generator);
    read(j, "arx_a", c.arx_a);
    read(j, "arx_b", c.arx_b);
    read(j, "arx_nk", c.arx_nk);
    read(j, "excitation", c.excitation);
    read(j, "amplitude", c.amplitude);
    read(j, "samples", c.samples);
    read(j, "process_noise", c.process_noise);
    read(j, "measurement_noise", c.measurement_noise);
    read(j, "synth_seed", c.synth_seed);
    read(j, "holdout_samples", c.holdout_samples);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("config file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ContractViolation(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

std::string canonical_config(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("out");
  j.erase("threads");
  return j.dump();
}

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig config_from_report(const std::filesystem::path& report) {
  std::ifstream in(report);
  if (!in) throw ContractViolation("report not found: " + report.string());
  std::string line;
  const std::string tag = "# config=";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) {
      try {
        return run_config_from_json(json::parse(line.substr(tag.size())));
      } catch (const json::exception& e) {
        throw ContractViolation(report.string() + ": bad embedded config: " + e.what());
      }
    }
    if (line.empty() || line[0] != '#') break;
  }
  throw ContractViolation(report.string() + " has no embedded config");
}

}  // namespace teleop
