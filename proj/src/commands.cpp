#include "teleop/commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "teleop/errors.hpp"
#include "teleop/model_io.hpp"
#include "teleop/rng.hpp"
#include "teleop/scenario.hpp"
#include "teleop/synthetic.hpp"
#include "teleop/trajectory.hpp"

namespace teleop {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ColumnLayout layout_for(const RunConfig& cfg) {
  return cfg.layout.empty() ? ColumnLayout::jigsaws() : ColumnLayout::load(cfg.layout);
}

TrajectorySet load_selected(const std::string& path, const RunConfig& cfg,
                            const ColumnLayout& layout) {
  TrajectorySet ts = load_kinematics(path, layout, cfg.dt.value_or(kJigsawsDt));
  try {
    if (!cfg.inputs.empty() || !cfg.outputs.empty()) {
      return select_channels(ts, cfg.inputs, cfg.outputs);
    }
    return select_preset(ts, cfg.preset);
  } catch (const LookupError& e) {
    throw LookupError(path + ": " + e.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractViolation("cannot write " + path.string());
  return out;
}

void prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw ContractViolation("cannot create output directory " + cfg.out);
}

ModelFile load_tuned_model(const RunConfig& cfg) {
  ModelFile mf = load_model(cfg.model);
  if (cfg.q) {
    mf.system.q = *cfg.q * Eigen::MatrixXd::Identity(mf.system.states(), mf.system.states());
  }
  if (cfg.r) {
    mf.system.r = *cfg.r * Eigen::MatrixXd::Identity(mf.system.outputs(), mf.system.outputs());
  }
  if (cfg.dt) mf.system.dt = *cfg.dt;
  mf.system.validate();
  return mf;
}

void check_channels(const SystemModel& model, const TrajectorySet& data) {
  if (data.inputs.cols() != model.inputs() || data.outputs.cols() != model.outputs()) {
    throw ContractViolation("model has " + std::to_string(model.inputs()) + " inputs / " +
                            std::to_string(model.outputs()) + " outputs but data '" +
                            data.trial_id + "' has " + std::to_string(data.inputs.cols()) +
                            " / " + std::to_string(data.outputs.cols()));
  }
}

ArxModel synth_generator(const RunConfig& cfg, double dt) {
  ArxModel gen = mimo2_generator(dt);
  if (cfg.generator == "mimo2") return gen;
  if (cfg.arx_b.empty()) throw ContractViolation("arx generator needs at least one b coefficient");
  gen.orders = {static_cast<int>(cfg.arx_a.size()), static_cast<int>(cfg.arx_b.size()),
                cfg.arx_nk};
  for (std::size_t o = 0; o < gen.a.size(); ++o) {
    gen.a[o] = Eigen::Map<const Eigen::VectorXd>(cfg.arx_a.data(),
                                                 static_cast<Eigen::Index>(cfg.arx_a.size()));
    gen.b[o] = Eigen::MatrixXd::Zero(gen.n_inputs(), gen.orders.nb);
    for (std::size_t j = 0; j < cfg.arx_b.size(); ++j) {
      gen.b[o](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j)) = cfg.arx_b[j];
    }
  }
  return gen;
}

ReportHeader report_header(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  ReportHeader h;
  h.tool_version = kToolVersion;
  h.config_json = canonical_config(cfg);
  h.config_hash = config_hash(h.config_json);
  h.rng_algorithm = std::string(Rng::kAlgorithm);
  h.seeds = seeds;
  return h;
}

std::string fit_cell(const FitValue& f) {
  if (!f) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *f);
  return buf;
}

}  // namespace

int cmd_identify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const ColumnLayout layout = layout_for(cfg);
    std::error_code ec;
    const bool same = fs::equivalent(cfg.data, cfg.holdout, ec);
    if (same) {
      err << "warning: holdout is the training file; fit scores are not an independent "
             "validation\n";
    }
    const TrajectorySet train = load_selected(cfg.data, cfg, layout);
    const TrajectorySet hold = load_selected(cfg.holdout, cfg, layout);
    const auto ranked = sweep_orders(train, hold, cfg.orders, same);

    prepare_out_dir(cfg);
    auto csv = open_output(fs::path(cfg.out) / "identify_fit.csv");
    csv << "rank,na,nb,nk";
    for (const auto& c : train.output_names) csv << ",fit_" << c;
    csv << ",fit_aggregate";
    for (const auto& c : train.output_names) csv << ",mse_" << c;
    csv << ",error\n";

    char line[256];
    std::snprintf(line, sizeof line, "%-5s %-14s %-12s %s\n", "rank", "model",
                  "fit (%)", "per-channel fit (%)");
    out << line;
    int rank = 0;
    for (const auto& c : ranked) {
      ++rank;
      csv << rank << ',' << c.orders.na << ',' << c.orders.nb << ',' << c.orders.nk;
      std::string channels;
      if (c.model) {
        for (const auto& f : c.report.fit_percent) {
          csv << ',' << (f ? num(*f) : "undefined");
          channels += fit_cell(f) + ' ';
        }
        csv << ',' << (c.report.aggregate() ? num(*c.report.aggregate()) : "undefined");
        for (double m : c.report.mse) csv << ',' << num(m);
        csv << ",\n";
      } else {
        for (std::size_t i = 0; i < 2 * train.output_names.size() + 1; ++i) csv << ',';
        csv << ",\"" << c.error << "\"\n";
        channels = "failed: " + c.error;
      }
      std::snprintf(line, sizeof line, "%-5d %-14s %-12s %s\n", rank,
                    c.orders.label().c_str(),
                    c.model ? fit_cell(c.report.aggregate()).c_str() : "-",
                    channels.c_str());
      out << line;
    }

    // Static maps and feedthrough models score fine but cannot drive the filter.
    const auto best = std::find_if(ranked.begin(), ranked.end(), [](const auto& c) {
      return c.model && c.orders.na >= 1 && c.orders.nk >= 1;
    });
    if (best == ranked.end()) {
      err << "error: no ARX order in the grid could be fitted and realized\n";
      return kExitUsage;
    }
    const ResidualNoise noise = residual_noise(*best->model, train);
    const fs::path model_path = fs::path(cfg.out) / "model.json";
    save_model(model_path, model_from_arx(*best->model, noise, best->report));
    out << "best: " << best->orders.label() << ", model written to " << model_path.string()
        << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    cfg.validate();
    const ModelFile mf = load_tuned_model(cfg);
    s.model = mf.system;
    s.data = load_selected(cfg.data, cfg, layout_for(cfg));
    check_channels(s.model, s.data);
    s.network = {cfg.delay_ms, cfg.jitter_ms, cfg.loss, cfg.seed, ChannelMode::kIndexHold};
    s.validate();
    prepare_out_dir(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  ScenarioResult res;
  try {
    res = run_scenario(s);
  } catch (const Error& e) {
    err << "scenario failed: " << e.what() << '\n';
    return kExitScenarioFailure;
  }

  const auto& names = s.data.output_names;
  auto trace = open_output(fs::path(cfg.out) / "trace.csv");
  trace << "# tool_version=" << kToolVersion << '\n';
  trace << "# config_hash=" << config_hash(canonical_config(cfg)) << '\n';
  trace << "# rng=" << Rng::kAlgorithm << '\n';
  trace << "# seeds=" << cfg.seed << '\n';
  trace << "time";
  for (const char* block : {"truth_", "delivered_", "estimate_"}) {
    for (const auto& c : names) trace << ',' << block << c;
  }
  trace << '\n';
  for (Eigen::Index k = 0; k < s.data.samples(); ++k) {
    trace << num(static_cast<double>(k) * s.model.dt);
    for (Eigen::Index c = 0; c < s.data.outputs.cols(); ++c) trace << ',' << num(s.data.outputs(k, c));
    for (Eigen::Index c = 0; c < s.data.outputs.cols(); ++c) trace << ',' << num(res.delivered(k, c));
    for (Eigen::Index c = 0; c < s.data.outputs.cols(); ++c) trace << ',' << num(res.z_est(k, c));
    trace << '\n';
  }

  out << "channel        mse            est (%)\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    char line[128];
    std::snprintf(line, sizeof line, "%-14s %-14.6g %s\n", names[c].c_str(), res.mse[c],
                  fit_cell(res.est_percent[c]).c_str());
    out << line;
  }
  out << "aggregate est (%): " << fit_cell(res.aggregate)
      << "\nrealized loss: " << res.channel_stats.realized_loss() << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SystemModel model;
  TrajectorySet data;
  SweepSpec spec;
  try {
    cfg.validate();
    model = load_tuned_model(cfg).system;
    data = load_selected(cfg.data, cfg, layout_for(cfg));
    check_channels(model, data);
    spec.points = cfg.sweep_points();
    for (const auto& p : spec.points) {
      NetworkConfig{p.delay_ms, p.jitter_ms, p.loss, 0, ChannelMode::kIndexHold}.validate();
    }
    spec.seeds = cfg.seeds;
    spec.base_seed = cfg.base_seed;
    spec.threads = cfg.threads;
    prepare_out_dir(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const SweepResult sweep = run_sweep(model, data, spec);
  const ReportHeader header = report_header(cfg, spec.seed_list());
  {
    auto f = open_output(fs::path(cfg.out) / "sweep_runs.csv");
    write_runs_csv(f, sweep, data.output_names, header);
  }
  {
    auto f = open_output(fs::path(cfg.out) / "sweep_aggregate.csv");
    write_aggregate_csv(f, sweep, data.output_names, header);
  }
  {
    auto f = open_output(fs::path(cfg.out) / "sweep_table.txt");
    write_table(f, sweep);
  }
  write_table(out, sweep);
  if (const auto failed = sweep.failures()) {
    err << failed << " scenario run(s) failed; see sweep_runs.csv\n";
    return kExitScenarioFailure;
  }
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const ColumnLayout layout = layout_for(cfg);
    const double dt = cfg.dt.value_or(kJigsawsDt);
    const ArxModel gen = synth_generator(cfg, dt);

    SyntheticSpec spec;
    spec.generator = gen;
    spec.excitation = cfg.excitation == "white" ? Excitation::kWhiteNoise : Excitation::kSumOfSines;
    spec.input_amplitude = cfg.amplitude;
    spec.samples = cfg.samples;
    spec.dt = dt;
    spec.process_noise_std = cfg.process_noise;
    spec.measurement_noise_std = cfg.measurement_noise;
    spec.seed = cfg.synth_seed;
    spec.input_names = gen.input_names;
    spec.output_names = gen.output_names;
    spec.trial_id = "synthetic";
    const TrajectorySet ts = gen_synthetic(spec);

    prepare_out_dir(cfg);
    {
      auto f = open_output(fs::path(cfg.out) / "synthetic.txt");
      write_kinematics(f, ts, layout);
    }
    if (cfg.holdout_samples > 0) {
      SyntheticSpec hold = spec;
      hold.samples = cfg.holdout_samples;
      hold.seed = Rng::splitmix64(cfg.synth_seed);
      hold.trial_id = "synthetic_holdout";
      auto f = open_output(fs::path(cfg.out) / "synthetic_holdout.txt");
      write_kinematics(f, gen_synthetic(hold), layout);
    }

    ResidualNoise noise;
    noise.q = std::max(cfg.process_noise * cfg.process_noise, kMinNoiseVariance);
    noise.r = Eigen::VectorXd::Constant(
        gen.n_outputs(),
        std::max(cfg.measurement_noise * cfg.measurement_noise, kMinNoiseVariance));
    ArxModel truth = gen;
    truth.trial_id = "synthetic";
    save_model(fs::path(cfg.out) / "synthetic_model.json", model_from_arx(truth, noise));
    out << "wrote " << ts.samples() << " samples to "
        << (fs::path(cfg.out) / "synthetic.txt").string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "identify") return cmd_identify(cfg, out, err);
  if (cfg.command == "run") return cmd_run(cfg, out, err);
  if (cfg.command == "sweep") return cmd_sweep(cfg, out, err);
  if (cfg.command == "synth") return cmd_synth(cfg, out, err);
  err << "error: unknown command '" << cfg.command << "'\n";
  return kExitUsage;
}

}  // namespace teleop
