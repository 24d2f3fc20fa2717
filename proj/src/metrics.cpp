#include "teleop/metrics.hpp"

#include <cmath>
#include <string>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

void require_same_shape(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate,
                        const char* what) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw ContractViolation(std::string(what) + ": truth is " +
                            std::to_string(truth.rows()) + "x" +
                            std::to_string(truth.cols()) + " but estimate is " +
                            std::to_string(estimate.rows()) + "x" +
                            std::to_string(estimate.cols()));
  }
}

}  // namespace

std::vector<FitValue> fit_percent(const Eigen::MatrixXd& truth,
                                  const Eigen::MatrixXd& estimate) {
  require_same_shape(truth, estimate, "fit_percent");
  if (truth.rows() < 2) throw ContractViolation("fit_percent needs at least 2 samples");
  std::vector<FitValue> out;
  out.reserve(static_cast<std::size_t>(truth.cols()));
  const double n = static_cast<double>(truth.rows());
  for (Eigen::Index c = 0; c < truth.cols(); ++c) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < truth.rows(); ++r) sum += truth(r, c);
    const double mean = sum / n;
    double err2 = 0.0;
    double dev2 = 0.0;
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
      const double e = truth(r, c) - estimate(r, c);
      const double d = truth(r, c) - mean;
      err2 += e * e;
      dev2 += d * d;
    }
    if (dev2 == 0.0) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(100.0 * (1.0 - std::sqrt(err2) / std::sqrt(dev2)));
    }
  }
  return out;
}

FitValue aggregate_fit(const std::vector<FitValue>& per_channel) {
  double sum = 0.0;
  int count = 0;
  for (const auto& f : per_channel) {
    if (f) {
      sum += *f;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

std::vector<double> mse(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate) {
  require_same_shape(truth, estimate, "mse");
  if (truth.rows() < 1) throw ContractViolation("mse needs at least 1 sample");
  std::vector<double> out;
  for (Eigen::Index c = 0; c < truth.cols(); ++c) {
    out.push_back((truth.col(c) - estimate.col(c)).squaredNorm() /
                  static_cast<double>(truth.rows()));
  }
  return out;
}

}  // namespace teleop
