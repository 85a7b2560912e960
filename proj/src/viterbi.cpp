#include <cmath>
#include <limits>
#include <string>

#include "phasehmm/error.hpp"
#include "phasehmm/hmm.hpp"

namespace phasehmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// delta is the best log score of any path ending in each state. Both decoders
// go through these two functions so the online result matches the offline one
// bit for bit.
void viterbi_init(const HmmModel& model, std::span<const double> emission,
                  std::span<double> delta) {
  const auto& log_pi = model.log_initial();
  for (std::size_t j = 0; j < delta.size(); ++j) {
    delta[j] = log_pi[static_cast<Eigen::Index>(j)] + emission[j];
  }
}

void viterbi_advance(const HmmModel& model, std::span<const double> delta,
                     std::span<const double> emission, std::span<double> next,
                     std::span<std::uint32_t> back) {
  const auto& log_a = model.log_transition();
  const std::size_t k = delta.size();
  for (std::size_t j = 0; j < k; ++j) {
    const double* column = log_a.col(static_cast<Eigen::Index>(j)).data();
    double best = delta[0] + column[0];
    std::uint32_t arg = 0;
    for (std::size_t i = 1; i < k; ++i) {
      const double cand = delta[i] + column[i];
      if (cand > best) {
        best = cand;
        arg = static_cast<std::uint32_t>(i);
      }
    }
    next[j] = best + emission[j];
    back[j] = arg;
  }
}

void check_scores_shape(const HmmModel& model, std::size_t size) {
  if (size % model.num_states() != 0) {
    throw Error(ErrorKind::DimensionMismatch, "score matrix is not T x K");
  }
}

}  // namespace

std::vector<double> emission_scores(const HmmModel& model, const ObservationSequence& obs) {
  if (obs.dim() != model.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "observation dimension " +
                                                  std::to_string(obs.dim()) +
                                                  " differs from model dimension " +
                                                  std::to_string(model.dim()));
  }
  const std::size_t k = model.num_states();
  std::vector<double> scores(obs.size() * k);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    model.log_emissions(obs.row(t), std::span<double>(scores).subspan(t * k, k));
  }
  return scores;
}

DecodeResult viterbi_from_scores(const HmmModel& model, std::span<const double> scores,
                                 double fps) {
  check_scores_shape(model, scores.size());
  const std::size_t k = model.num_states();
  const std::size_t length = scores.size() / k;
  if (length == 0) throw Error(ErrorKind::EmptySequence, "cannot decode an empty sequence");

  std::vector<double> delta(k);
  std::vector<double> next(k);
  std::vector<std::uint32_t> back(length * k, 0);

  viterbi_init(model, scores.subspan(0, k), delta);
  for (std::size_t t = 1; t < length; ++t) {
    viterbi_advance(model, delta, scores.subspan(t * k, k), next,
                    std::span<std::uint32_t>(back).subspan(t * k, k));
    delta.swap(next);
  }

  const PhaseIndex last = argmax(delta);
  if (!(delta[last] > kNegInf)) {
    throw Error(ErrorKind::NoFeasiblePath, "every state path has zero probability");
  }
  std::vector<PhaseIndex> states(length);
  states[length - 1] = last;
  for (std::size_t t = length - 1; t > 0; --t) {
    states[t - 1] = back[t * k + states[t]];
  }
  return DecodeResult{LabelSequence(std::move(states), fps), delta[last]};
}

DecodeResult viterbi_offline(const HmmModel& model, const ObservationSequence& obs) {
  if (obs.empty()) throw Error(ErrorKind::EmptySequence, "cannot decode an empty sequence");
  return viterbi_from_scores(model, emission_scores(model, obs), obs.fps());
}

OnlineDecoder::OnlineDecoder(HmmModel model)
    : model_(std::move(model)),
      delta_(model_.num_states(), kNegInf),
      next_(model_.num_states()),
      emission_(model_.num_states()),
      back_(model_.num_states()) {}

PhaseIndex OnlineDecoder::step(std::span<const double> y) {
  model_.log_emissions(y, emission_);
  if (frames_ == 0) {
    viterbi_init(model_, emission_, next_);
  } else {
    viterbi_advance(model_, delta_, emission_, next_, back_);
  }
  const PhaseIndex best = argmax(next_);
  if (!(next_[best] > kNegInf)) {
    throw Error(ErrorKind::NoFeasiblePath,
                "no feasible state at frame " + std::to_string(frames_));
  }
  delta_.swap(next_);
  ++frames_;
  current_ = best;
  return best;
}

PhaseIndex OnlineDecoder::current_state() const {
  if (frames_ == 0) throw Error(ErrorKind::OutOfRange, "decoder has not consumed any frame");
  return current_;
}

void OnlineDecoder::reset() {
  std::fill(delta_.begin(), delta_.end(), kNegInf);
  frames_ = 0;
  current_ = 0;
}

LabelSequence decode_online(const HmmModel& model, const ObservationSequence& obs) {
  if (obs.dim() != model.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "observation dimension " +
                                                  std::to_string(obs.dim()) +
                                                  " differs from model dimension " +
                                                  std::to_string(model.dim()));
  }
  OnlineDecoder decoder(model);
  LabelSequence out(obs.fps());
  for (std::size_t t = 0; t < obs.size(); ++t) out.push_back(decoder.step(obs.row(t)));
  return out;
}

}  // namespace phasehmm
