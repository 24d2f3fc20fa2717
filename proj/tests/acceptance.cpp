// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "teleop/arx.hpp"
#include "teleop/channel.hpp"
#include "teleop/commands.hpp"
#include "teleop/filter.hpp"
#include "teleop/metrics.hpp"
#include "teleop/scenario.hpp"
#include "teleop/sweep.hpp"
#include "teleop/synthetic.hpp"

namespace {

using namespace teleop;
namespace fs = std::filesystem;

// Covariance health accumulated over criteria 1-4.
struct Hygiene {
  double max_asymmetry = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  long steps = 0;

  void observe(const Eigen::MatrixXd& p) {
    max_asymmetry = std::max(max_asymmetry, asymmetry(p));
    min_eigenvalue = std::min(min_eigenvalue, teleop::min_eigenvalue(p));
    ++steps;
  }
  void observe(const ScenarioResult& r, Eigen::Index steps_in_run) {
    max_asymmetry = std::max(max_asymmetry, r.max_asymmetry);
    min_eigenvalue = std::min(min_eigenvalue, r.min_eigenvalue);
    steps += 2 * steps_in_run;
  }
};

Hygiene hygiene;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::Index draw_dim(Rng& rng, Eigen::Index max) {
  return std::min<Eigen::Index>(max, 1 + static_cast<Eigen::Index>(rng.uniform() * max));
}

// The synthetic stand-in for the teleoperation data: identified on one
// realization of the MIMO generator, evaluated on others.
struct SyntheticSetup {
  SystemModel model;
  ArxModel arx;
};

TrajectorySet mimo2_realization(std::uint64_t seed, Eigen::Index samples, std::string trial) {
  SyntheticSpec spec;
  spec.generator = mimo2_generator();
  spec.samples = samples;
  spec.seed = seed;
  spec.process_noise_std = 1e-3;
  spec.measurement_noise_std = 1e-3;
  spec.trial_id = std::move(trial);
  return gen_synthetic(spec);
}

const SyntheticSetup& setup() {
  static const SyntheticSetup s = [] {
    const auto train = mimo2_realization(1001, 3000, "train");
    SyntheticSetup out;
    out.arx = arx_fit(train, {2, 2, 1});
    out.model = to_system_model(out.arx, residual_noise(out.arx, train));
    return out;
  }();
  return s;
}

Verdict unimpaired_ceiling() {
  const auto t0 = std::chrono::steady_clock::now();
  double sum = 0.0, worst = 100.0;
  const int seeds = 30;
  for (int i = 0; i < seeds; ++i) {
    const auto data = mimo2_realization(2000 + i, 1000, "eval");
    const auto r = run_scenario(Scenario{setup().model, {0, 0, 0, static_cast<std::uint64_t>(i + 1)},
                                         data, std::nullopt});
    hygiene.observe(r, data.samples());
    sum += r.aggregate.value_or(-1e9);
    worst = std::min(worst, r.aggregate.value_or(-1e9));
  }
  const double mean = sum / seeds;
  const double elapsed = seconds_since(t0);
  return {mean >= 99.0 && elapsed < 5.0,
          fmt("mean Est%% %.4f (min %.4f) over %d seeds, %.2f s", mean, worst, seeds, elapsed)};
}

Verdict degradation_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepSpec spec;
  spec.points = table1_points();
  spec.seeds = 30;
  const auto data = mimo2_realization(3000, 1000, "eval");
  const SweepResult sweep = run_sweep(setup().model, data, spec);
  for (const auto& run : sweep.runs) {
    if (run.result) hygiene.observe(*run.result, data.samples());
  }
  std::vector<double> est;
  std::string table;
  for (const auto& row : sweep.rows) {
    est.push_back(row.est_aggregate_mean.value_or(-1e9));
    table += fmt(" (%g,%g,%.2f)=%.3f", row.point.jitter_ms, row.point.delay_ms, row.point.loss,
                 est.back());
  }
  const double rho = spearman(severity_rank(spec.points), est);
  const auto worst_idx = static_cast<std::size_t>(
      std::find(spec.points.begin(), spec.points.end(), NetworkPoint{5, 7, 0.20}) -
      spec.points.begin());
  std::size_t below = 0;
  for (double e : est) below += e < est[worst_idx];
  const double elapsed = seconds_since(t0);
  return {sweep.failures() == 0 && rho < 0.0 && below <= 1 && elapsed < 60.0,
          fmt("spearman %.4f, (5,7,0.20) rank from bottom %zu, %.2f s;", rho, below + 1,
              elapsed) +
              table};
}

Verdict sequential_equals_joint() {
  Rng rng(3);
  double worst_x = 0.0, worst_p = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = draw_dim(rng, 8), p = draw_dim(rng, 6);
    SystemModel m;
    m.a = Eigen::MatrixXd::Identity(n, n);
    m.b = Eigen::MatrixXd::Zero(n, 1);
    m.h = random_matrix(p, n, rng);
    m.q = Eigen::MatrixXd::Identity(n, n);
    m.r = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) m.r(i, i) = 0.05 + rng.uniform();
    const Eigen::MatrixXd l = random_matrix(n, n, rng);
    StateEstimate prior{random_matrix(n, 1, rng),
                        l * l.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n), 0};
    const Eigen::VectorXd z = random_matrix(p, 1, rng);
    const auto seq = update_sequential(prior, m, z);
    const auto joint = update_joint(prior, m, z);
    for (const StateEstimate* e : std::initializer_list<const StateEstimate*>{&prior, &seq, &joint}) hygiene.observe(e->p);
    worst_x = std::max(worst_x, (seq.x - joint.x).norm() / std::max(1.0, joint.x.norm()));
    worst_p = std::max(worst_p, (seq.p - joint.p).norm() / std::max(1.0, joint.p.norm()));
  }
  return {worst_x <= 1e-8 && worst_p <= 1e-8,
          fmt("max relative discrepancy: state %.3g, covariance %.3g", worst_x, worst_p)};
}

Verdict riccati_fixed_point() {
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double q = rng.uniform(), r = rng.uniform();
    SystemModel m;
    m.a = m.h = Eigen::MatrixXd::Identity(1, 1);
    m.b = Eigen::MatrixXd::Zero(1, 1);
    m.q = Eigen::MatrixXd::Constant(1, 1, q);
    m.r = Eigen::MatrixXd::Constant(1, 1, r);
    StateEstimate est{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 0};
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    for (int i = 0; i < 5000; ++i) {
      const auto prior = predict(est, m, zero);
      est = update_sequential(prior, m, zero);
      hygiene.observe(prior.p);
      hygiene.observe(est.p);
    }
    const double root = (-q + std::sqrt(q * q + 4.0 * q * r)) / 2.0;
    worst = std::max(worst, std::abs(est.p(0, 0) - root));
  }
  return {worst <= 1e-9, fmt("max |P - root| = %.3g over 20 (q, r) pairs", worst)};
}

Verdict covariance_hygiene() {
  return {hygiene.max_asymmetry <= 1e-9 && hygiene.min_eigenvalue >= -1e-9,
          fmt("%ld covariances: max asymmetry %.3g, min eigenvalue %.3g", hygiene.steps,
              hygiene.max_asymmetry, hygiene.min_eigenvalue)};
}

ArxModel siso(std::vector<double> a, std::vector<double> b) {
  ArxModel m;
  m.orders = {static_cast<int>(a.size()), static_cast<int>(b.size()), 1};
  m.a = {Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()))};
  m.b = {Eigen::Map<Eigen::MatrixXd>(b.data(), 1, static_cast<Eigen::Index>(b.size()))};
  return m;
}

double coefficient_error(const ArxModel& fit, const ArxModel& truth) {
  return std::max((fit.a[0] - truth.a[0]).cwiseAbs().maxCoeff(),
                  (fit.b[0] - truth.b[0]).cwiseAbs().maxCoeff());
}

Verdict arx_recovery() {
  double clean = 0.0;
  int noisy_ok = 0;
  const std::vector<ArxModel> truths{siso({0.5}, {1.0}), siso({1.2, -0.5}, {0.7, 0.3})};
  for (const auto& truth : truths) {
    SyntheticSpec spec;
    spec.generator = truth;
    spec.excitation = Excitation::kWhiteNoise;
    spec.samples = 600;
    spec.seed = 1;
    clean = std::max(clean, coefficient_error(arx_fit(gen_synthetic(spec), truth.orders), truth));
  }
  const ArxModel noisy_truth = siso({0.5}, {1.0});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticSpec spec;
    spec.generator = noisy_truth;
    spec.excitation = Excitation::kWhiteNoise;
    spec.samples = 5000;
    spec.seed = seed;
    spec.measurement_noise_std = 0.01;
    const auto fit = arx_fit(gen_synthetic(spec), noisy_truth.orders);
    noisy_ok += coefficient_error(fit, noisy_truth) <= 0.01;
  }
  return {clean <= 1e-6 && noisy_ok >= 19,
          fmt("noise-free max error %.3g; sigma=0.01 within 0.01 in %d/20 seeds", clean,
              noisy_ok)};
}

Verdict realization_equivalence() {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ArxModel m;
    m.orders = {1 + trial % 4, 1 + (trial / 4) % 4, 1 + (trial / 16) % 2};
    const Eigen::Index inputs = 2, outputs = 3;
    for (Eigen::Index o = 0; o < outputs; ++o) {
      // Characteristic polynomial from real roots in (-0.9, 0.9).
      Eigen::VectorXd poly = Eigen::VectorXd::Zero(m.orders.na + 1);
      poly(0) = 1.0;
      for (int i = 0; i < m.orders.na; ++i) {
        const double root = 1.8 * rng.uniform() - 0.9;
        const Eigen::VectorXd prev = poly;
        for (int j = 1; j <= i + 1; ++j) poly(j) -= root * prev(j - 1);
      }
      m.a.push_back(-poly.tail(m.orders.na));
      m.b.push_back(random_matrix(inputs, m.orders.nb, rng));
    }
    const SystemModel ss = arx_to_ss(m);
    const Eigen::MatrixXd u = random_matrix(200, inputs, rng);
    Eigen::MatrixXd y_ss(200, outputs);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.states());
    for (Eigen::Index t = 0; t < 200; ++t) {
      if (t > 0) x = ss.a * x + ss.b * u.row(t - 1).transpose();
      y_ss.row(t) = (ss.h * x).transpose();
    }
    const Eigen::MatrixXd y_arx = simulate_arx(m, u, y_ss.topRows(m.orders.na));
    worst = std::max(worst, (y_ss - y_arx).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("max deviation %.3g over 100 models x 200 steps", worst)};
}

Verdict channel_statistics() {
  const Eigen::Index n = 10000;
  Eigen::MatrixXd truth(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) truth.row(k) << static_cast<double>(k), -0.5 * k;
  bool ok = true;
  std::string detail;
  for (double np : {0.1, 0.2}) {
    Channel ch({0, 0, np, 17}, 1.0 / 30.0, truth);
    for (Eigen::Index k = 1; k < n; ++k) ch.observe(k);
    const double realized = ch.stats().realized_loss();
    const double bound = 3.0 * std::sqrt(np * (1 - np) / static_cast<double>(ch.stats().steps));
    ok = ok && std::abs(realized - np) <= bound;
    detail += fmt("n_p=%.1f realized %.4f (3 sigma %.4f); ", np, realized, bound);
  }
  Channel ideal({0, 0, 0, 5}, 1.0 / 30.0, truth);
  bool identity = true;
  for (Eigen::Index k = 1; k < n; ++k) {
    identity = identity && ideal.observe(k) == truth.row(k).transpose();
  }
  ok = ok && identity && ideal.stats().lost == 0;
  return {ok, detail + (identity ? "(0,0,0) is the identity" : "(0,0,0) altered samples")};
}

Verdict fit_anchors() {
  Eigen::MatrixXd y(5, 1);
  y << 1.0, -2.0, 0.5, 3.25, 7.0;
  const double exact = *fit_percent(y, y)[0];
  const double at_mean = *fit_percent(y, Eigen::MatrixXd::Constant(5, 1, y.mean()))[0];
  Eigen::MatrixXd t(4, 1), e(4, 1);
  t << 0, 1, 2, 3;
  e << 0, 1, 2, 5;
  const double hand = *fit_percent(t, e)[0];
  const double expected = 100.0 * (1.0 - 2.0 / std::sqrt(5.0));
  return {exact == 100.0 && at_mean == 0.0 && std::abs(hand - expected) <= 1e-9,
          fmt("identity %.17g, mean %.17g, example %.15f (expected %.15f)", exact, at_mean,
              hand, expected)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict reproducibility() {
  const fs::path dir = fs::path(TELEOP_TEST_TMP);
  fs::remove_all(dir);
  std::ostringstream sink;
  RunConfig synth;
  synth.command = "synth";
  synth.out = dir.string();
  synth.samples = 600;
  if (dispatch(synth, sink, sink) != kExitOk) return {false, "synth failed: " + sink.str()};

  RunConfig sweep;
  sweep.command = "sweep";
  sweep.data = (dir / "synthetic.txt").string();
  sweep.model = (dir / "synthetic_model.json").string();
  sweep.scenarios = table1_points();
  sweep.seeds = 5;
  sweep.out = (dir / "first").string();
  if (dispatch(sweep, sink, sink) != kExitOk) return {false, "sweep failed: " + sink.str()};
  const fs::path report = dir / "first" / "sweep_aggregate.csv";

  RunConfig again = config_from_report(report);
  again.out = (dir / "second").string();
  if (dispatch(again, sink, sink) != kExitOk) return {false, "re-run failed: " + sink.str()};
  const std::string a = slurp(report);
  const std::string b = slurp(dir / "second" / "sweep_aggregate.csv");
  return {!a.empty() && a == b,
          fmt("%zu-byte aggregated CSV, re-run %s", a.size(),
              a == b ? "byte-identical" : "differs")};
}

Verdict innovation_consistency() {
  SystemModel m;
  m.a.resize(2, 2);
  m.a << 0.95, 0.1, 0.0, 0.9;
  m.b.resize(2, 1);
  m.b << 0.0, 0.1;
  m.h = Eigen::MatrixXd::Identity(2, 2);
  m.q = Eigen::Vector2d(0.01, 0.02).asDiagonal();
  m.r = Eigen::Vector2d(0.1, 0.05).asDiagonal();
  const Eigen::Index n = 10000, p = 2;
  Rng rng(2024);
  const Eigen::MatrixXd u = make_excitation(Excitation::kSumOfSines, n, 1, 1.0, m.dt, rng);
  const TruthTrace truth = simulate_truth(m, u, Eigen::VectorXd::Zero(2), rng);
  std::vector<Eigen::VectorXd> inputs;
  std::vector<std::optional<Eigen::VectorXd>> obs;
  for (Eigen::Index k = 1; k < n; ++k) {
    inputs.push_back(u.row(k - 1).transpose());
    obs.push_back(Eigen::VectorXd(truth.outputs.row(k).transpose()));
  }
  std::vector<Innovation> innov;
  run_filter(m, initial_estimate(m, Eigen::VectorXd(truth.outputs.row(0).transpose())), inputs,
             obs, &innov);
  double nis = 0.0;
  for (const auto& i : innov) nis += i.normalized_squared();
  nis /= static_cast<double>(innov.size());
  double worst_rho = 0.0;
  for (Eigen::Index c = 0; c < p; ++c) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t + 1 < innov.size(); ++t) {
      num += innov[t].residual(c) * innov[t + 1].residual(c);
      den += innov[t].residual(c) * innov[t].residual(c);
    }
    worst_rho = std::max(worst_rho, std::abs(num / den));
  }
  return {nis >= 0.9 * p && nis <= 1.1 * p && worst_rho <= 0.05,
          fmt("mean NIS %.4f (p=%ld), max |lag-1 autocorrelation| %.4f", nis,
              static_cast<long>(p), worst_rho)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"unimpaired ceiling", unimpaired_ceiling},
      {"degradation trend", degradation_trend},
      {"sequential equals joint update", sequential_equals_joint},
      {"scalar Riccati fixed point", riccati_fixed_point},
      {"covariance hygiene", covariance_hygiene},
      {"ARX recovery", arx_recovery},
      {"realization equivalence", realization_equivalence},
      {"channel statistics", channel_statistics},
      {"fit_percent anchors", fit_anchors},
      {"sweep reproducibility", reproducibility},
      {"innovation consistency", innovation_consistency},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] %2d %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
