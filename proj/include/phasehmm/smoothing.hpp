#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "phasehmm/sequence.hpp"

namespace phasehmm {

inline constexpr std::size_t kDefaultSmoothingWindow = 15;

struct SmoothingConfig {
  std::size_t window = kDefaultSmoothingWindow;

  void validate() const;
};

/// Streaming form of smooth(): feed one row at a time, get the mean of the
/// trailing window back. During warm-up the mean covers only the rows seen so
/// far. Each output is summed afresh from the buffered rows (oldest first), so
/// no running-sum drift accumulates.
class CausalSmoother {
 public:
  CausalSmoother(std::size_t dim, SmoothingConfig cfg);

  std::span<const double> push(std::span<const double> row);
  void reset();

  std::size_t dim() const noexcept { return dim_; }
  std::size_t window() const noexcept { return cfg_.window; }

 private:
  std::size_t dim_;
  SmoothingConfig cfg_;
  std::deque<std::vector<double>> buffer_;
  std::vector<double> mean_;
};

/// Causal trailing mean of log-probability rows; same shape and fps as obs.
ObservationSequence smooth(const ObservationSequence& obs, SmoothingConfig cfg = {});

}  // namespace phasehmm
