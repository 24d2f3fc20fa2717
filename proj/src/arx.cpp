#include "teleop/arx.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

constexpr double kRankThreshold = 1e-10;

Eigen::Index first_full_row(const ArxOrders& o) {
  return std::max<Eigen::Index>(o.na, o.nk + o.nb - 1);
}

Eigen::Index companion_size(const ArxOrders& o) {
  return std::max<Eigen::Index>(o.na, o.nk + o.nb - 1);
}

double channel_radius(const Eigen::VectorXd& a) {
  const Eigen::Index na = a.size();
  if (na == 0) return 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(na, na);
  c.row(0) = a.transpose();
  if (na > 1) c.bottomLeftCorner(na - 1, na - 1).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Σ_in Σ_j b(in, j)·u_in[t-nk-j] with u before t = 0 taken as zero.
double input_term(const Eigen::MatrixXd& b, const Eigen::MatrixXd& u, Eigen::Index t,
                  int nk) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const Eigen::Index idx = t - nk - j;
    if (idx < 0) continue;
    s += u.row(idx).dot(b.col(j));
  }
  return s;
}

}  // namespace

std::string ArxOrders::label() const {
  std::ostringstream os;
  os << "arx(" << na << "," << nb << "," << nk << ")";
  return os.str();
}

void ArxModel::validate() const {
  if (orders.na < 0 || orders.nb < 1 || orders.nk < 0) {
    throw ContractViolation("ARX orders need na >= 0, nb >= 1, nk >= 0");
  }
  if (a.empty() || a.size() != b.size()) {
    throw ContractViolation("ARX model needs one a/b coefficient set per output");
  }
  const Eigen::Index m = n_inputs();
  for (std::size_t o = 0; o < a.size(); ++o) {
    if (a[o].size() != orders.na) {
      throw ContractViolation("a coefficients of output " + std::to_string(o) +
                              " have length " + std::to_string(a[o].size()) +
                              ", expected na = " + std::to_string(orders.na));
    }
    if (b[o].rows() != m || b[o].cols() != orders.nb) {
      throw ContractViolation("b coefficients of output " + std::to_string(o) +
                              " are not n_inputs x nb");
    }
  }
  if (!input_names.empty() && static_cast<Eigen::Index>(input_names.size()) != m) {
    throw ContractViolation("ARX input name count does not match n_inputs");
  }
  if (!output_names.empty() && output_names.size() != a.size()) {
    throw ContractViolation("ARX output name count does not match n_outputs");
  }
  if (!(dt > 0.0)) throw ContractViolation("ARX dt must be positive");
}

double ArxModel::spectral_radius() const {
  double r = 0.0;
  for (const auto& ac : a) r = std::max(r, channel_radius(ac));
  return r;
}

bool ArxModel::is_stable() const { return spectral_radius() < 1.0; }

ArxModel arx_fit(const TrajectorySet& data, const ArxOrders& orders) {
  data.validate();
  if (orders.na < 0 || orders.nb < 1 || orders.nk < 0) {
    throw ContractViolation("ARX orders need na >= 0, nb >= 1, nk >= 0");
  }
  const Eigen::Index n = data.samples();
  if (n <= orders.na + orders.nb + orders.nk + 10) {
    throw ContractViolation("trajectory of " + std::to_string(n) +
                            " samples is too short for " + orders.label());
  }
  const Eigen::Index m = data.inputs.cols();
  const Eigen::Index t0 = first_full_row(orders);
  const Eigen::Index rows = n - t0;
  const Eigen::Index cols = orders.na + m * orders.nb;

  ArxModel model;
  model.orders = orders;
  model.dt = data.dt;
  model.input_names = data.input_names;
  model.output_names = data.output_names;
  model.trial_id = data.trial_id;

  // Input block of the regressor is shared by every output.
  Eigen::MatrixXd regressor(rows, cols);
  for (Eigen::Index in = 0; in < m; ++in) {
    for (Eigen::Index j = 0; j < orders.nb; ++j) {
      regressor.col(orders.na + in * orders.nb + j) =
          data.inputs.col(in).segment(t0 - orders.nk - j, rows);
    }
  }

  for (Eigen::Index o = 0; o < data.outputs.cols(); ++o) {
    for (Eigen::Index i = 0; i < orders.na; ++i) {
      regressor.col(i) = data.outputs.col(o).segment(t0 - 1 - i, rows);
    }
    const Eigen::VectorXd target = data.outputs.col(o).segment(t0, rows);

    std::vector<Eigen::Index> active;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (regressor.col(c).squaredNorm() > 0.0) active.push_back(c);
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(cols);
    if (!active.empty()) {
      Eigen::MatrixXd reduced(rows, static_cast<Eigen::Index>(active.size()));
      for (std::size_t c = 0; c < active.size(); ++c) {
        reduced.col(static_cast<Eigen::Index>(c)) = regressor.col(active[c]);
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(reduced);
      qr.setThreshold(kRankThreshold);
      const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
      const double condition = diag.minCoeff() > 0.0
                                   ? diag.maxCoeff() / diag.minCoeff()
                                   : std::numeric_limits<double>::infinity();
      if (qr.rank() < reduced.cols()) {
        std::ostringstream os;
        os << "regressor for output " << o << " is rank deficient (rank " << qr.rank()
           << " of " << reduced.cols() << ", condition estimate " << condition
           << ") at " << orders.label();
        throw IllConditionedData(os.str(), condition);
      }
      const Eigen::VectorXd sol = qr.solve(target);
      for (std::size_t c = 0; c < active.size(); ++c) {
        theta(active[c]) = sol(static_cast<Eigen::Index>(c));
      }
    }
    model.a.push_back(theta.head(orders.na));
    Eigen::MatrixXd b(m, orders.nb);
    for (Eigen::Index in = 0; in < m; ++in) {
      b.row(in) = theta.segment(orders.na + in * orders.nb, orders.nb).transpose();
    }
    model.b.push_back(std::move(b));
  }
  return model;
}

SystemModel arx_to_ss(const ArxModel& model) {
  model.validate();
  const ArxOrders& o = model.orders;
  if (o.na == 0) {
    throw UnsupportedStructure(
        "ARX model with na = 0 is a static input map; the filter needs dynamic state");
  }
  if (o.nk == 0) {
    throw UnsupportedStructure(
        "ARX model with nk = 0 has direct feedthrough, which the state-space "
        "model cannot represent");
  }
  const Eigen::Index nc = companion_size(o);
  const Eigen::Index p = model.n_outputs();
  const Eigen::Index m = model.n_inputs();

  SystemModel ss;
  ss.dt = model.dt;
  ss.a = Eigen::MatrixXd::Zero(nc * p, nc * p);
  ss.b = Eigen::MatrixXd::Zero(nc * p, m);
  ss.h = Eigen::MatrixXd::Zero(p, nc * p);
  ss.q = Eigen::MatrixXd::Zero(nc * p, nc * p);
  ss.r = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index ch = 0; ch < p; ++ch) {
    const Eigen::Index off = ch * nc;
    const auto& a = model.a[static_cast<std::size_t>(ch)];
    const auto& b = model.b[static_cast<std::size_t>(ch)];
    for (Eigen::Index i = 0; i < nc; ++i) {
      if (i < o.na) ss.a(off + i, off) = a(i);
      if (i + 1 < nc) ss.a(off + i, off + i + 1) = 1.0;
      // State row i carries the coefficient of u[t-(i+1)].
      const Eigen::Index j = i + 1 - o.nk;
      if (j >= 0 && j < o.nb) ss.b.row(off + i) = b.col(j).transpose();
    }
    ss.h(ch, off) = 1.0;
  }
  return ss;
}

Eigen::MatrixXd simulate_arx(const ArxModel& model, const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& y_init) {
  model.validate();
  const Eigen::Index na = model.orders.na;
  const Eigen::Index p = model.n_outputs();
  if (u.cols() != model.n_inputs()) {
    throw ContractViolation("simulate_arx: input has " + std::to_string(u.cols()) +
                            " channels, model expects " +
                            std::to_string(model.n_inputs()));
  }
  if (y_init.rows() < na || (na > 0 && y_init.cols() != p)) {
    throw ContractViolation("simulate_arx: y_init needs at least na = " +
                            std::to_string(na) + " rows of " + std::to_string(p) +
                            " outputs");
  }
  const Eigen::Index n = u.rows();
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, p);
  const Eigen::Index head = std::min(na, n);
  if (head > 0) y.topRows(head) = y_init.topRows(head);
  for (Eigen::Index t = na; t < n; ++t) {
    for (Eigen::Index o = 0; o < p; ++o) {
      const auto& a = model.a[static_cast<std::size_t>(o)];
      double s = input_term(model.b[static_cast<std::size_t>(o)], u, t, model.orders.nk);
      for (Eigen::Index i = 0; i < na; ++i) s += a(i) * y(t - 1 - i, o);
      y(t, o) = s;
    }
  }
  return y;
}

Eigen::MatrixXd predict_one_step(const ArxModel& model, const TrajectorySet& data) {
  model.validate();
  data.validate();
  if (data.inputs.cols() != model.n_inputs() || data.outputs.cols() != model.n_outputs()) {
    throw ContractViolation("predict_one_step: channel counts differ from the model");
  }
  const Eigen::Index na = model.orders.na;
  const Eigen::Index n = data.samples();
  Eigen::MatrixXd y = data.outputs;
  for (Eigen::Index t = na; t < n; ++t) {
    for (Eigen::Index o = 0; o < model.n_outputs(); ++o) {
      const auto& a = model.a[static_cast<std::size_t>(o)];
      double s = input_term(model.b[static_cast<std::size_t>(o)], data.inputs, t,
                            model.orders.nk);
      for (Eigen::Index i = 0; i < na; ++i) s += a(i) * data.outputs(t - 1 - i, o);
      y(t, o) = s;
    }
  }
  return y;
}

FitReport cross_validate(const ArxModel& model, const TrajectorySet& holdout,
                         bool allow_same_trial) {
  model.validate();
  holdout.validate();
  if (holdout.inputs.cols() != model.n_inputs() ||
      holdout.outputs.cols() != model.n_outputs()) {
    throw ContractViolation("cross_validate: holdout has " +
                            std::to_string(holdout.inputs.cols()) + " inputs / " +
                            std::to_string(holdout.outputs.cols()) +
                            " outputs, model has " + std::to_string(model.n_inputs()) +
                            " / " + std::to_string(model.n_outputs()));
  }
  if (!allow_same_trial && !model.trial_id.empty() &&
      model.trial_id == holdout.trial_id) {
    throw ContractViolation("cross_validate: holdout trial '" + holdout.trial_id +
                            "' is the training trial");
  }
  const Eigen::Index na = model.orders.na;
  const Eigen::Index n = holdout.samples();
  if (n < na + 2) throw ContractViolation("cross_validate: holdout is too short");

  const Eigen::MatrixXd sim = simulate_arx(model, holdout.inputs, holdout.outputs.topRows(na));
  FitReport report;
  report.model_label = model.orders.label();
  report.fit_percent = fit_percent(holdout.outputs.bottomRows(n - na), sim.bottomRows(n - na));
  report.mse = mse(holdout.outputs.bottomRows(n - na), sim.bottomRows(n - na));
  return report;
}

ResidualNoise residual_noise(const ArxModel& model, const TrajectorySet& training) {
  const Eigen::MatrixXd pred = predict_one_step(model, training);
  const Eigen::Index t0 = first_full_row(model.orders);
  const Eigen::Index rows = training.samples() - t0;
  if (rows < 1) throw ContractViolation("residual_noise: training data too short");
  ResidualNoise noise;
  noise.r.resize(model.n_outputs());
  for (Eigen::Index o = 0; o < model.n_outputs(); ++o) {
    const double var =
        (training.outputs.col(o).tail(rows) - pred.col(o).tail(rows)).squaredNorm() /
        static_cast<double>(rows);
    noise.r(o) = std::max(var, kMinNoiseVariance);
  }
  noise.q = noise.r.mean();
  return noise;
}

SystemModel to_system_model(const ArxModel& model, const ResidualNoise& noise) {
  SystemModel ss = arx_to_ss(model);
  if (noise.r.size() != ss.outputs()) {
    throw ContractViolation("to_system_model: R has the wrong number of channels");
  }
  ss.q = noise.q * Eigen::MatrixXd::Identity(ss.states(), ss.states());
  ss.r = noise.r.asDiagonal();
  ss.validate();
  return ss;
}

std::vector<ArxOrders> OrderGrid::enumerate() const {
  std::vector<ArxOrders> out;
  for (int na = na_min; na <= na_max; ++na) {
    for (int nb = nb_min; nb <= nb_max; ++nb) {
      for (int nk = nk_min; nk <= nk_max; ++nk) out.push_back({na, nb, nk});
    }
  }
  return out;
}

std::vector<OrderCandidate> sweep_orders(const TrajectorySet& training,
                                         const TrajectorySet& holdout,
                                         const OrderGrid& grid, bool allow_same_trial) {
  const auto orders = grid.enumerate();
  if (orders.empty()) throw ContractViolation("order grid is empty");
  std::vector<OrderCandidate> out;
  for (const auto& o : orders) {
    OrderCandidate c;
    c.orders = o;
    c.report.model_label = o.label();
    try {
      ArxModel m = arx_fit(training, o);
      c.report = cross_validate(m, holdout, allow_same_trial);
      c.model = std::move(m);
    } catch (const IllConditionedData& e) {
      c.error = e.what();
    }
    out.push_back(std::move(c));
  }
  auto key = [](const OrderCandidate& c) {
    const FitValue f = c.model ? c.report.aggregate() : std::nullopt;
    return f ? std::llround(*f * 1e6) : std::numeric_limits<long long>::min();
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    const auto kx = key(x), ky = key(y);
    if (kx != ky) return kx > ky;
    return x.orders.total() < y.orders.total();
  });
  return out;
}

}  // namespace teleop
