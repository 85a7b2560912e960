#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "phasehmm/error.hpp"
#include "phasehmm/hmm.hpp"

namespace phasehmm {

namespace {

void check_distribution(const Eigen::Ref<const Eigen::VectorXd>& p, const std::string& what) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw Error(ErrorKind::InvariantViolation,
                  what + " has invalid entry " + std::to_string(p[i]) + " at " +
                      std::to_string(i));
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw Error(ErrorKind::InvariantViolation, what + " sums to " + std::to_string(sum));
  }
}

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

HmmModel::HmmModel(Eigen::VectorXd initial, Eigen::MatrixXd transition,
                   std::vector<Eigen::VectorXd> means, std::vector<Eigen::MatrixXd> covariances)
    : initial_(std::move(initial)),
      transition_(std::move(transition)),
      means_(std::move(means)),
      covariances_(std::move(covariances)) {
  const auto k = initial_.size();
  if (k < 1) throw Error(ErrorKind::InvariantViolation, "model needs at least one state");
  if (transition_.rows() != k || transition_.cols() != k) {
    throw Error(ErrorKind::InvariantViolation, "transition matrix must be K x K");
  }
  if (means_.size() != static_cast<std::size_t>(k) ||
      covariances_.size() != static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::InvariantViolation, "need one mean and one covariance per state");
  }
  dim_ = static_cast<std::size_t>(means_[0].size());
  if (dim_ < 1) throw Error(ErrorKind::InvariantViolation, "observation dimension must be >= 1");

  check_distribution(initial_, "initial distribution");
  for (Eigen::Index i = 0; i < k; ++i) {
    check_distribution(transition_.row(i).transpose(), "transition row " + std::to_string(i));
  }

  log_initial_ = initial_.unaryExpr(&safe_log);
  log_transition_ = transition_.unaryExpr(&safe_log);

  const auto d = static_cast<Eigen::Index>(dim_);
  chol_.reserve(means_.size());
  log_norm_.reserve(means_.size());
  for (std::size_t s = 0; s < means_.size(); ++s) {
    const auto& mu = means_[s];
    const auto& cov = covariances_[s];
    const std::string tag = "state " + std::to_string(s);
    if (mu.size() != d) throw Error(ErrorKind::InvariantViolation, tag + " mean has wrong size");
    if (!mu.allFinite()) throw Error(ErrorKind::InvariantViolation, tag + " mean not finite");
    if (cov.rows() != d || cov.cols() != d) {
      throw Error(ErrorKind::InvariantViolation, tag + " covariance must be D x D");
    }
    if (!cov.allFinite()) throw Error(ErrorKind::InvariantViolation, tag + " covariance not finite");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw Error(ErrorKind::InvariantViolation, tag + " covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::InvariantViolation, tag + " covariance is not positive definite");
    }
    Eigen::MatrixXd lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    chol_.push_back(std::move(lower));
    log_norm_.push_back(-0.5 * (static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi) +
                                log_det));
  }
}

double HmmModel::log_emission(std::size_t k, std::span<const double> y) const {
  if (k >= num_states()) {
    throw Error(ErrorKind::OutOfRange, "state " + std::to_string(k) + " out of range");
  }
  if (y.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "observation has dimension " +
                                                  std::to_string(y.size()) + ", model expects " +
                                                  std::to_string(dim_));
  }
  // Forward substitution L z = y - mu, accumulating |z|^2 on the fly.
  const auto& lower = chol_[k];
  const auto& mu = means_[k];
  double small[16];
  std::vector<double> large;
  double* z = small;
  if (dim_ > 16) {
    large.resize(dim_);
    z = large.data();
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double acc = y[i] - mu[ii];
    for (std::size_t j = 0; j < i; ++j) acc -= lower(ii, static_cast<Eigen::Index>(j)) * z[j];
    z[i] = acc / lower(ii, ii);
    quad += z[i] * z[i];
  }
  return log_norm_[k] - 0.5 * quad;
}

void HmmModel::log_emissions(std::span<const double> y, std::span<double> out) const {
  if (out.size() != num_states()) {
    throw Error(ErrorKind::DimensionMismatch, "output span must hold K entries");
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = log_emission(k, y);
}

}  // namespace phasehmm
