#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "phasehmm/sequence.hpp"

namespace phasehmm {

inline constexpr double kStochasticTolerance = 1e-9;

/*!
 * Hidden Markov model with one multivariate Gaussian emission per state.
 *
 * Parameters are validated on construction: the initial distribution and every
 * transition row must be stochastic within kStochasticTolerance, and every
 * covariance must be symmetric and admit a Cholesky factorization. Zero
 * probabilities are kept exactly; their logs are -inf and decoding never
 * crosses them while a finite path exists.
 *
 * Immutable after construction.
 */
class HmmModel {
 public:
  HmmModel(Eigen::VectorXd initial, Eigen::MatrixXd transition,
           std::vector<Eigen::VectorXd> means, std::vector<Eigen::MatrixXd> covariances);

  std::size_t num_states() const noexcept { return static_cast<std::size_t>(initial_.size()); }
  std::size_t dim() const noexcept { return dim_; }

  const Eigen::VectorXd& initial() const noexcept { return initial_; }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  const std::vector<Eigen::VectorXd>& means() const noexcept { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const noexcept { return covariances_; }

  const Eigen::VectorXd& log_initial() const noexcept { return log_initial_; }
  const Eigen::MatrixXd& log_transition() const noexcept { return log_transition_; }
  /// Lower Cholesky factor of covariance k.
  const Eigen::MatrixXd& cholesky(std::size_t k) const { return chol_.at(k); }

  /// log N(y; mean_k, cov_k), evaluated through the Cholesky factor.
  double log_emission(std::size_t k, std::span<const double> y) const;

  /// Fills out[k] = log_emission(k, y) for every state.
  void log_emissions(std::span<const double> y, std::span<double> out) const;

 private:
  Eigen::VectorXd initial_;
  Eigen::MatrixXd transition_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::size_t dim_ = 0;

  Eigen::VectorXd log_initial_;
  Eigen::MatrixXd log_transition_;
  std::vector<Eigen::MatrixXd> chol_;
  std::vector<double> log_norm_;  // -0.5 * (D log 2pi + log det cov_k)
};

// ---------------------------------------------------------------------------
// Supervised fitting by counting and maximum likelihood.

Eigen::VectorXd fit_initial(std::span<const LabelSequence> label_seqs, std::size_t k);
Eigen::MatrixXd fit_transitions(std::span<const LabelSequence> label_seqs, std::size_t k);

struct EmissionFitOptions {
  bool diagonal = false;                 // zero off-diagonal covariance terms before regularizing
  double initial_regularizer = 1e-6;     // eps, scaled by trace(cov)/D
  double max_regularizer = 1e-2;
};

struct EmissionParams {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<std::size_t> frame_counts;
  std::vector<double> regularizers;  // eps finally applied per state
};

/// Per-state ML mean and covariance of the rows assigned to it, then
/// cov += eps * (trace(cov)/D) * I with eps escalating x10 until the Cholesky
/// factorization succeeds. A zero-trace covariance uses scale 1.
EmissionParams fit_emissions(std::span<const ObservationSequence> obs_seqs,
                             std::span<const LabelSequence> label_seqs, std::size_t k,
                             const EmissionFitOptions& options = {});

/// Adds the regularizer to a raw ML covariance. Returns the eps used.
double regularize_covariance(Eigen::MatrixXd& cov, const EmissionFitOptions& options);

struct FitResult {
  HmmModel model;
  std::vector<std::size_t> frame_counts;
};

FitResult fit(std::span<const ObservationSequence> obs_seqs,
              std::span<const LabelSequence> label_seqs, std::size_t k,
              const EmissionFitOptions& options = {});

// ---------------------------------------------------------------------------
// Decoding.

struct DecodeResult {
  LabelSequence states;
  double log_joint;
};

/// Most likely state path. Ties resolve to the lowest state index both for the
/// final state and for every back-pointer.
DecodeResult viterbi_offline(const HmmModel& model, const ObservationSequence& obs);

/// Viterbi over precomputed log-emission scores (row-major T x K).
DecodeResult viterbi_from_scores(const HmmModel& model, std::span<const double> scores,
                                 double fps);

/// Row-major T x K matrix of log-emission values.
std::vector<double> emission_scores(const HmmModel& model, const ObservationSequence& obs);

/// Prefix decoder: after step t it reports the final state of the Viterbi path
/// over y_1..y_t. Keeps only the K best prefix scores, so a step costs
/// O(K^2 + K D^2). Single owner; not safe for concurrent mutation.
class OnlineDecoder {
 public:
  explicit OnlineDecoder(HmmModel model);

  /// Consumes one observation and returns the current best final state. On
  /// NoFeasiblePath the decoder is left unchanged.
  PhaseIndex step(std::span<const double> y);

  /// Throws OutOfRange before the first step.
  PhaseIndex current_state() const;

  std::size_t frames() const noexcept { return frames_; }
  std::span<const double> prefix_scores() const noexcept { return delta_; }
  const HmmModel& model() const noexcept { return model_; }

  void reset();

 private:
  HmmModel model_;
  std::vector<double> delta_;
  std::vector<double> next_;
  std::vector<double> emission_;
  std::vector<std::uint32_t> back_;
  std::size_t frames_ = 0;
  PhaseIndex current_ = 0;
};

/// Online decode of a whole sequence: element t is the state after step t.
LabelSequence decode_online(const HmmModel& model, const ObservationSequence& obs);

// ---------------------------------------------------------------------------
// Sampling.

struct SampledSequence {
  LabelSequence labels;
  ObservationSequence observations;
};

SampledSequence sample(const HmmModel& model, std::size_t length, std::mt19937_64& rng,
                       double fps = 1.0);
SampledSequence sample(const HmmModel& model, std::size_t length, std::uint64_t seed,
                       double fps = 1.0);

}  // namespace phasehmm
