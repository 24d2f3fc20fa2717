#include "teleop/filter.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kEigenFloor = -1e-9;

std::string shape(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows,
                   Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "dimension mismatch: " << name << " is " << shape(m) << ", expected "
       << rows << "x" << cols;
    throw ContractViolation(os.str());
  }
}

void require_length(const Eigen::VectorXd& v, Eigen::Index n, const char* name) {
  if (v.size() != n) {
    std::ostringstream os;
    os << "dimension mismatch: " << name << " has length " << v.size()
       << ", expected " << n;
    throw ContractViolation(os.str());
  }
}

void require_estimate(const StateEstimate& est, const SystemModel& model) {
  const Eigen::Index n = model.states();
  require_length(est.x, n, "x_hat");
  require_shape(est.p, n, n, "P");
}

double symmetric_condition(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
  const double lo = ev.minCoeff();
  return lo == 0.0 ? std::numeric_limits<double>::infinity() : ev.maxCoeff() / lo;
}

}  // namespace

void SystemModel::validate() const {
  const Eigen::Index n = a.rows();
  if (n == 0) throw ContractViolation("dimension mismatch: A has no states");
  require_shape(a, n, n, "A");
  if (b.rows() != n) {
    throw ContractViolation("dimension mismatch: B has " + std::to_string(b.rows()) +
                            " rows, expected " + std::to_string(n));
  }
  if (h.cols() != n) {
    throw ContractViolation("dimension mismatch: H has " + std::to_string(h.cols()) +
                            " columns, expected " + std::to_string(n));
  }
  require_shape(q, n, n, "Q");
  require_shape(r, h.rows(), h.rows(), "R");
  if (asymmetry(q) > kSymmetryTolerance * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw ContractViolation("Q is not symmetric");
  }
  if (asymmetry(r) > kSymmetryTolerance * std::max(1.0, r.cwiseAbs().maxCoeff())) {
    throw ContractViolation("R is not symmetric");
  }
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
}

double Innovation::normalized_squared() const {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw SingularInnovation("innovation covariance is not positive definite",
                             symmetric_condition(covariance));
  }
  return residual.dot(llt.solve(residual));
}

double asymmetry(const Eigen::MatrixXd& p) {
  return (p - p.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXd& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void condition_covariance(Eigen::MatrixXd& p) {
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() >= 0.0) return;
  bool clipped = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0 && ev(i) >= kEigenFloor) {
      ev(i) = 0.0;
      clipped = true;
    }
  }
  if (!clipped) return;
  p = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  p = 0.5 * (p + p.transpose()).eval();
}

StateEstimate predict(const StateEstimate& est, const SystemModel& model,
                      const Eigen::VectorXd& u) {
  require_estimate(est, model);
  require_length(u, model.inputs(), "u");
  StateEstimate out;
  out.x = model.a * est.x + model.b * u;
  out.p = model.a * est.p * model.a.transpose() + model.q;
  condition_covariance(out.p);
  out.k = est.k + 1;
  return out;
}

Innovation innovation(const StateEstimate& prior, const SystemModel& model,
                      const Eigen::VectorXd& z) {
  require_estimate(prior, model);
  require_length(z, model.outputs(), "z");
  Innovation inn;
  inn.residual = z - model.h * prior.x;
  inn.covariance = model.h * prior.p * model.h.transpose() + model.r;
  return inn;
}

StateEstimate update_joint(const StateEstimate& prior, const SystemModel& model,
                           const Eigen::VectorXd& z) {
  const Innovation inn = innovation(prior, model, z);
  Eigen::LLT<Eigen::MatrixXd> llt(inn.covariance);
  if (llt.info() != Eigen::Success) {
    const double cond = symmetric_condition(inn.covariance);
    std::ostringstream os;
    os << "innovation covariance is not positive definite (condition " << cond
       << ")";
    throw SingularInnovation(os.str(), cond);
  }
  // K = P Hᵀ S⁻¹, so Kᵀ = S⁻¹ H P for symmetric P.
  const Eigen::MatrixXd gain = llt.solve(model.h * prior.p).transpose();
  const Eigen::Index n = model.states();

  StateEstimate out;
  out.x = prior.x + gain * inn.residual;
  out.p = (Eigen::MatrixXd::Identity(n, n) - gain * model.h) * prior.p;
  condition_covariance(out.p);
  out.k = prior.k;
  return out;
}

StateEstimate update_sequential(const StateEstimate& prior,
                                const SystemModel& model,
                                const Eigen::VectorXd& z) {
  require_estimate(prior, model);
  require_length(z, model.outputs(), "z");
  const Eigen::Index p = model.outputs();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i != j && model.r(i, j) != 0.0) {
        throw PreconditionError(
            "sequential update requires a diagonal measurement covariance R");
      }
    }
  }

  StateEstimate out = prior;
  for (Eigen::Index d = 0; d < p; ++d) {
    const auto row = model.h.row(d);
    const Eigen::VectorXd ph = out.p * row.transpose();
    const double variance = row.dot(ph) + model.r(d, d);
    if (!(variance > 0.0) || !std::isfinite(variance)) {
      std::ostringstream os;
      os << "innovation variance of measurement row " << d << " is " << variance;
      throw SingularInnovation(os.str(), std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd gain = ph / variance;
    out.x += gain * (z(d) - row.dot(out.x));
    out.p -= gain * ph.transpose();
  }
  condition_covariance(out.p);
  return out;
}

StateEstimate initial_estimate(const SystemModel& model,
                               const std::optional<Eigen::VectorXd>& first_observation) {
  const Eigen::Index n = model.states();
  StateEstimate est;
  est.p = kInitialCovarianceScale * Eigen::MatrixXd::Identity(n, n);
  if (first_observation) {
    require_length(*first_observation, model.outputs(), "first observation");
    est.x = model.h.completeOrthogonalDecomposition().solve(*first_observation);
  } else {
    est.x = Eigen::VectorXd::Zero(n);
  }
  return est;
}

std::vector<StateEstimate> run_filter(
    const SystemModel& model, const StateEstimate& init,
    const std::vector<Eigen::VectorXd>& inputs,
    const std::vector<std::optional<Eigen::VectorXd>>& observations,
    std::vector<Innovation>* innovations) {
  if (inputs.size() != observations.size()) {
    throw ContractViolation("run_filter: " + std::to_string(inputs.size()) +
                            " inputs but " + std::to_string(observations.size()) +
                            " observations");
  }
  if (inputs.empty()) throw ContractViolation("run_filter: empty input sequence");

  std::vector<StateEstimate> out;
  out.reserve(inputs.size());
  StateEstimate current = init;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    current = predict(current, model, inputs[i]);
    if (observations[i]) {
      if (innovations) innovations->push_back(innovation(current, model, *observations[i]));
      current = update_sequential(current, model, *observations[i]);
    }
    out.push_back(current);
  }
  return out;
}

}  // namespace teleop
