// Command-line front end: identify, run, sweep, synth.
//
// Precedence: built-in defaults < --from-report < --config < explicit flags.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "teleop/commands.hpp"
#include "teleop/errors.hpp"
#include "teleop/run_config.hpp"
#include "teleop/sweep.hpp"

namespace {

template <typename T>
void set_if(const CLI::Option* opt, const T& value, T& field) {
  if (opt->count() > 0) field = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kalman filter state estimation under simulated network impairments"};
  app.set_version_flag("--version", std::string(teleop::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, report_path;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--from-report", report_path,
                 "Re-run the configuration embedded in a report CSV")
      ->check(CLI::ExistingFile);

  teleop::RunConfig f;
  auto* o_data = app.add_option("--data", f.data, "Kinematics file");
  auto* o_holdout = app.add_option("--holdout", f.holdout, "Validation kinematics file");
  auto* o_model = app.add_option("--model", f.model, "Model file");
  auto* o_layout = app.add_option("--layout", f.layout, "Column layout descriptor");
  auto* o_preset = app.add_option("--preset", f.preset, "Channel preset: paper | all");
  auto* o_inputs = app.add_option("--inputs", f.inputs, "Input channel names")->delimiter(',');
  auto* o_outputs = app.add_option("--outputs", f.outputs, "Output channel names")->delimiter(',');
  double dt = 0.0;
  auto* o_dt = app.add_option("--dt", dt, "Sample period override, seconds");
  auto* o_out = app.add_option("--out", f.out, "Output directory");
  auto* o_threads = app.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  double q = 0.0, r = 0.0;
  auto* o_q = app.add_option("--q", q, "Process noise override, Q = q I");
  auto* o_r = app.add_option("--r", r, "Measurement noise override, R = r I");

  auto* o_na_min = app.add_option("--na-min", f.orders.na_min);
  auto* o_na_max = app.add_option("--na-max", f.orders.na_max);
  auto* o_nb_min = app.add_option("--nb-min", f.orders.nb_min);
  auto* o_nb_max = app.add_option("--nb-max", f.orders.nb_max);
  auto* o_nk_min = app.add_option("--nk-min", f.orders.nk_min);
  auto* o_nk_max = app.add_option("--nk-max", f.orders.nk_max);

  auto* o_delay = app.add_option("--delay", f.delay_ms, "Network delay, ms");
  auto* o_jitter = app.add_option("--jitter", f.jitter_ms, "Jitter standard deviation, ms");
  auto* o_loss = app.add_option("--loss", f.loss, "Packet loss probability");
  auto* o_seed = app.add_option("--seed", f.seed, "Channel seed");

  auto* o_delays = app.add_option("--delays", f.delays_ms, "Sweep delays, ms")->delimiter(',');
  auto* o_jitters = app.add_option("--jitters", f.jitters_ms, "Sweep jitters, ms")->delimiter(',');
  auto* o_losses = app.add_option("--losses", f.losses, "Sweep loss probabilities")->delimiter(',');
  bool table1 = false;
  app.add_flag("--table1", table1, "Sweep the seven published network settings");
  auto* o_seeds = app.add_option("--seeds", f.seeds, "Seeds per network setting");
  auto* o_base_seed = app.add_option("--base-seed", f.base_seed, "First seed");

  auto* o_generator = app.add_option("--generator", f.generator, "mimo2 | arx");
  auto* o_arx_a = app.add_option("--arx-a", f.arx_a)->delimiter(',');
  auto* o_arx_b = app.add_option("--arx-b", f.arx_b)->delimiter(',');
  auto* o_arx_nk = app.add_option("--arx-nk", f.arx_nk);
  auto* o_excitation = app.add_option("--excitation", f.excitation, "sines | white");
  auto* o_amplitude = app.add_option("--amplitude", f.amplitude);
  auto* o_samples = app.add_option("--samples", f.samples);
  auto* o_pn = app.add_option("--process-noise", f.process_noise);
  auto* o_mn = app.add_option("--measurement-noise", f.measurement_noise);
  auto* o_synth_seed = app.add_option("--synth-seed", f.synth_seed);
  auto* o_holdout_samples = app.add_option("--holdout-samples", f.holdout_samples);

  for (const char* name : {"identify", "run", "sweep", "synth"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return teleop::kExitUsage;
  }

  teleop::RunConfig cfg;
  try {
    if (!report_path.empty()) cfg = teleop::config_from_report(report_path);
    if (!config_path.empty()) cfg = teleop::load_run_config(config_path, cfg);
  } catch (const teleop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return teleop::kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  set_if(o_data, f.data, cfg.data);
  set_if(o_holdout, f.holdout, cfg.holdout);
  set_if(o_model, f.model, cfg.model);
  set_if(o_layout, f.layout, cfg.layout);
  set_if(o_preset, f.preset, cfg.preset);
  set_if(o_inputs, f.inputs, cfg.inputs);
  set_if(o_outputs, f.outputs, cfg.outputs);
  if (o_dt->count()) cfg.dt = dt;
  set_if(o_out, f.out, cfg.out);
  set_if(o_threads, f.threads, cfg.threads);
  if (o_q->count()) cfg.q = q;
  if (o_r->count()) cfg.r = r;
  set_if(o_na_min, f.orders.na_min, cfg.orders.na_min);
  set_if(o_na_max, f.orders.na_max, cfg.orders.na_max);
  set_if(o_nb_min, f.orders.nb_min, cfg.orders.nb_min);
  set_if(o_nb_max, f.orders.nb_max, cfg.orders.nb_max);
  set_if(o_nk_min, f.orders.nk_min, cfg.orders.nk_min);
  set_if(o_nk_max, f.orders.nk_max, cfg.orders.nk_max);
  set_if(o_delay, f.delay_ms, cfg.delay_ms);
  set_if(o_jitter, f.jitter_ms, cfg.jitter_ms);
  set_if(o_loss, f.loss, cfg.loss);
  set_if(o_seed, f.seed, cfg.seed);
  set_if(o_delays, f.delays_ms, cfg.delays_ms);
  set_if(o_jitters, f.jitters_ms, cfg.jitters_ms);
  set_if(o_losses, f.losses, cfg.losses);
  if (table1) cfg.scenarios = teleop::table1_points();
  set_if(o_seeds, f.seeds, cfg.seeds);
  set_if(o_base_seed, f.base_seed, cfg.base_seed);
  set_if(o_generator, f.generator, cfg.generator);
  set_if(o_arx_a, f.arx_a, cfg.arx_a);
  set_if(o_arx_b, f.arx_b, cfg.arx_b);
  set_if(o_arx_nk, f.arx_nk, cfg.arx_nk);
  set_if(o_excitation, f.excitation, cfg.excitation);
  set_if(o_amplitude, f.amplitude, cfg.amplitude);
  set_if(o_samples, f.samples, cfg.samples);
  set_if(o_pn, f.process_noise, cfg.process_noise);
  set_if(o_mn, f.measurement_noise, cfg.measurement_noise);
  set_if(o_synth_seed, f.synth_seed, cfg.synth_seed);
  set_if(o_holdout_samples, f.holdout_samples, cfg.holdout_samples);

  return teleop::dispatch(cfg, std::cout, std::cerr);
}
