#include <string>

#include "phasehmm/error.hpp"
#include "phasehmm/hmm.hpp"

namespace phasehmm {

Eigen::VectorXd fit_initial(std::span<const LabelSequence> label_seqs, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  std::size_t used = 0;
  for (const auto& seq : label_seqs) {
    if (seq.empty()) continue;
    seq.check_labels(k);
    counts[static_cast<Eigen::Index>(seq[0])] += 1.0;
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::EmptyInput, "no non-empty label sequence to count");
  return counts / static_cast<double>(used);
}

Eigen::MatrixXd fit_transitions(std::span<const LabelSequence> label_seqs, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(kk, kk);
  for (const auto& seq : label_seqs) {
    seq.check_labels(k);
    for (std::size_t t = 1; t < seq.size(); ++t) {
      counts(static_cast<Eigen::Index>(seq[t - 1]), static_cast<Eigen::Index>(seq[t])) += 1.0;
    }
  }
  for (Eigen::Index i = 0; i < kk; ++i) {
    const double total = counts.row(i).sum();
    if (total > 0.0) {
      counts.row(i) /= total;
    } else {
      counts.row(i).setConstant(1.0 / static_cast<double>(k));
    }
  }
  return counts;
}

double regularize_covariance(Eigen::MatrixXd& cov, const EmissionFitOptions& options) {
  const auto d = cov.rows();
  const double trace = cov.trace();
  const double scale = trace > 0.0 ? trace / static_cast<double>(d) : 1.0;
  const Eigen::MatrixXd raw = cov;
  // Multiplying by 10 from 1e-6 does not land exactly on 1e-2; the small slack
  // keeps the cap value itself in the schedule.
  for (double eps = options.initial_regularizer; eps <= options.max_regularizer * (1.0 + 1e-9);
       eps *= 10.0) {
    cov = raw;
    cov.diagonal().array() += eps * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return eps;
  }
  cov = raw;
  throw Error(ErrorKind::DegenerateCovariance,
              "covariance stays singular with regularizer up to " +
                  std::to_string(options.max_regularizer));
}

EmissionParams fit_emissions(std::span<const ObservationSequence> obs_seqs,
                             std::span<const LabelSequence> label_seqs, std::size_t k,
                             const EmissionFitOptions& options) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  if (obs_seqs.size() != label_seqs.size()) {
    throw Error(ErrorKind::LengthMismatch, "need one label sequence per observation sequence");
  }
  if (obs_seqs.empty()) throw Error(ErrorKind::EmptyInput, "no training sequences");
  const std::size_t dim = obs_seqs.front().dim();
  for (std::size_t s = 0; s < obs_seqs.size(); ++s) {
    validate_pair(obs_seqs[s], label_seqs[s]);
    label_seqs[s].check_labels(k);
    if (obs_seqs[s].dim() != dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sequence " + std::to_string(s) + " has dimension " +
                      std::to_string(obs_seqs[s].dim()) + ", expected " + std::to_string(dim));
    }
  }

  const auto d = static_cast<Eigen::Index>(dim);
  EmissionParams params;
  params.means.assign(k, Eigen::VectorXd::Zero(d));
  params.covariances.assign(k, Eigen::MatrixXd::Zero(d, d));
  params.frame_counts.assign(k, 0);

  // Sequential sums in file/frame order.
  for (std::size_t s = 0; s < obs_seqs.size(); ++s) {
    const auto& obs = obs_seqs[s];
    for (std::size_t t = 0; t < obs.size(); ++t) {
      const auto state = label_seqs[s][t];
      auto row = obs.row(t);
      auto& mu = params.means[state];
      for (Eigen::Index i = 0; i < d; ++i) mu[i] += row[static_cast<std::size_t>(i)];
      ++params.frame_counts[state];
    }
  }
  for (std::size_t state = 0; state < k; ++state) {
    if (params.frame_counts[state] == 0) {
      throw Error(ErrorKind::UnseenState,
                  "state " + std::to_string(state) + " has no training frames");
    }
    params.means[state] /= static_cast<double>(params.frame_counts[state]);
  }

  Eigen::VectorXd centered(d);
  for (std::size_t s = 0; s < obs_seqs.size(); ++s) {
    const auto& obs = obs_seqs[s];
    for (std::size_t t = 0; t < obs.size(); ++t) {
      const auto state = label_seqs[s][t];
      auto row = obs.row(t);
      for (Eigen::Index i = 0; i < d; ++i) {
        centered[i] = row[static_cast<std::size_t>(i)] - params.means[state][i];
      }
      params.covariances[state].selfadjointView<Eigen::Lower>().rankUpdate(centered);
    }
  }

  params.regularizers.resize(k);
  for (std::size_t state = 0; state < k; ++state) {
    auto& cov = params.covariances[state];
    Eigen::MatrixXd full = cov.selfadjointView<Eigen::Lower>();
    cov = full / static_cast<double>(params.frame_counts[state]);
    if (options.diagonal) cov = Eigen::MatrixXd(cov.diagonal().asDiagonal());
    try {
      params.regularizers[state] = regularize_covariance(cov, options);
    } catch (const Error& e) {
      throw Error(ErrorKind::DegenerateCovariance,
                  "state " + std::to_string(state) + ": " + e.detail());
    }
  }
  return params;
}

FitResult fit(std::span<const ObservationSequence> obs_seqs,
              std::span<const LabelSequence> label_seqs, std::size_t k,
              const EmissionFitOptions& options) {
  auto emissions = fit_emissions(obs_seqs, label_seqs, k, options);
  HmmModel model(fit_initial(label_seqs, k), fit_transitions(label_seqs, k),
                 std::move(emissions.means), std::move(emissions.covariances));
  return FitResult{std::move(model), std::move(emissions.frame_counts)};
}

}  // namespace phasehmm
