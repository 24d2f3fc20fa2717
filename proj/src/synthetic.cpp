#include "teleop/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

// Symmetric square-root factor: F Fᵀ = C for PSD C.
Eigen::MatrixXd noise_factor(const Eigen::MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()));
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Eigen::VectorXd normals(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = rng.normal();
  return g;
}

std::vector<std::string> default_names(const std::string& prefix, Eigen::Index n) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

double spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TruthTrace simulate_truth(const SystemModel& model, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& x0, Rng& rng) {
  model.validate();
  if (inputs.cols() != model.inputs()) {
    throw ContractViolation("simulate_truth: input has " + std::to_string(inputs.cols()) +
                            " channels, model expects " + std::to_string(model.inputs()));
  }
  if (x0.size() != model.states()) {
    throw ContractViolation("simulate_truth: x0 has the wrong length");
  }
  const Eigen::Index n = inputs.rows();
  const Eigen::MatrixXd fq = noise_factor(model.q);
  const Eigen::MatrixXd fr = noise_factor(model.r);
  TruthTrace trace;
  trace.states.resize(n, model.states());
  trace.outputs.resize(n, model.outputs());
  Eigen::VectorXd x = x0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) {
      x = model.a * x + model.b * inputs.row(k - 1).transpose() +
          fq * normals(model.states(), rng);
    }
    trace.states.row(k) = x.transpose();
    trace.outputs.row(k) =
        (model.h * x + fr * normals(model.outputs(), rng)).transpose();
  }
  return trace;
}

Eigen::MatrixXd make_excitation(Excitation kind, Eigen::Index samples,
                                Eigen::Index channels, double amplitude, double dt,
                                Rng& rng) {
  Eigen::MatrixXd u(samples, channels);
  if (kind == Excitation::kWhiteNoise) {
    for (Eigen::Index t = 0; t < samples; ++t) {
      for (Eigen::Index c = 0; c < channels; ++c) u(t, c) = amplitude * rng.normal();
    }
    return u;
  }
  constexpr int kComponents = 5;
  const double scale = amplitude / std::sqrt(kComponents / 2.0);
  u.setZero();
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (int s = 0; s < kComponents; ++s) {
      const double freq = 0.05 + 1.45 * rng.uniform();
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      for (Eigen::Index t = 0; t < samples; ++t) {
        u(t, c) += scale *
                   std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) * dt + phase);
      }
    }
  }
  return u;
}

TrajectorySet gen_synthetic(const SyntheticSpec& spec) {
  if (spec.samples < 1) throw ContractViolation("synthetic trajectory needs samples >= 1");
  if (!(spec.dt > 0.0)) throw ContractViolation("synthetic dt must be positive");
  if (spec.process_noise_std < 0.0 || spec.measurement_noise_std < 0.0) {
    throw ContractViolation("noise standard deviations must be >= 0");
  }
  Rng root(spec.seed);
  Rng excitation_rng = root.split(1);
  Rng noise_rng = root.split(2);

  TrajectorySet ts;
  ts.dt = spec.dt;
  ts.trial_id = spec.trial_id;

  if (const auto* arx = std::get_if<ArxModel>(&spec.generator)) {
    arx->validate();
    if (!spec.allow_unstable && !arx->is_stable()) {
      throw ContractViolation("ARX generator is unstable (spectral radius " +
                              std::to_string(arx->spectral_radius()) +
                              "); set allow_unstable to use it");
    }
    const Eigen::Index m = arx->n_inputs();
    const Eigen::Index p = arx->n_outputs();
    const Eigen::Index na = arx->orders.na;
    ts.inputs = make_excitation(spec.excitation, spec.samples, m, spec.input_amplitude,
                                spec.dt, excitation_rng);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(spec.samples, p);
    for (Eigen::Index t = 0; t < spec.samples; ++t) {
      for (Eigen::Index o = 0; o < p; ++o) {
        const auto& a = arx->a[static_cast<std::size_t>(o)];
        const auto& b = arx->b[static_cast<std::size_t>(o)];
        double s = 0.0;
        for (Eigen::Index i = 0; i < na; ++i) {
          if (t - 1 - i >= 0) s += a(i) * y(t - 1 - i, o);
        }
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
          const Eigen::Index idx = t - arx->orders.nk - j;
          if (idx >= 0) s += ts.inputs.row(idx).dot(b.col(j));
        }
        y(t, o) = s + spec.process_noise_std * noise_rng.normal();
      }
    }
    ts.outputs = y;
    for (Eigen::Index t = 0; t < spec.samples; ++t) {
      for (Eigen::Index o = 0; o < p; ++o) {
        ts.outputs(t, o) += spec.measurement_noise_std * noise_rng.normal();
      }
    }
  } else {
    const auto& ss = std::get<SystemModel>(spec.generator);
    ss.validate();
    if (!spec.allow_unstable && spectral_radius(ss.a) >= 1.0) {
      throw ContractViolation("state-space generator is unstable; set allow_unstable to use it");
    }
    ts.inputs = make_excitation(spec.excitation, spec.samples, ss.inputs(),
                                spec.input_amplitude, spec.dt, excitation_rng);
    ts.outputs = simulate_truth(ss, ts.inputs, Eigen::VectorXd::Zero(ss.states()), noise_rng)
                     .outputs;
  }

  ts.input_names = spec.input_names;
  ts.output_names = spec.output_names;
  if (const auto* arx = std::get_if<ArxModel>(&spec.generator)) {
    if (ts.input_names.empty()) ts.input_names = arx->input_names;
    if (ts.output_names.empty()) ts.output_names = arx->output_names;
  }
  if (ts.input_names.empty()) ts.input_names = default_names("u", ts.inputs.cols());
  if (ts.output_names.empty()) ts.output_names = default_names("y", ts.outputs.cols());
  ts.validate();
  return ts;
}

ArxModel mimo2_generator(double dt) {
  ArxModel m;
  m.orders = {2, 2, 1};
  m.dt = dt;
  m.input_names = {"mtmr_pos_x", "mtmr_pos_y", "mtmr_pos_z",
                   "mtmr_vel_x", "mtmr_vel_y", "mtmr_vel_z"};
  m.output_names = {"psmr_pos_x", "psmr_pos_y", "psmr_pos_z"};
  // Poles per channel: 0.8 ± 0.2i, 0.85 ± 0.15i, 0.75 ± 0.25i.
  const double re[] = {0.8, 0.85, 0.75};
  const double im[] = {0.2, 0.15, 0.25};
  for (int o = 0; o < 3; ++o) {
    Eigen::VectorXd a(2);
    a << 2.0 * re[o], -(re[o] * re[o] + im[o] * im[o]);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6, 2);
    const double dc = 1.0 - a(0) - a(1);
    b(o, 0) = 0.6 * dc;
    b(o, 1) = 0.4 * dc;
    b(o + 3, 0) = 0.1 * dc;
    b((o + 1) % 3, 1) = 0.05 * dc;
    m.a.push_back(a);
    m.b.push_back(b);
  }
  return m;
}

}  // namespace teleop
