#include "phasehmm/smoothing.hpp"

#include <algorithm>

#include "phasehmm/error.hpp"

namespace phasehmm {

void SmoothingConfig::validate() const {
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "smoothing window must be >= 1");
}

CausalSmoother::CausalSmoother(std::size_t dim, SmoothingConfig cfg)
    : dim_(dim), cfg_(cfg), mean_(dim, 0.0) {
  cfg_.validate();
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "smoother dimension must be >= 1");
}

std::span<const double> CausalSmoother::push(std::span<const double> row) {
  if (row.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                                  " entries, smoother expects " +
                                                  std::to_string(dim_));
  }
  if (buffer_.size() == cfg_.window) {
    // Recycle the evicted row's storage.
    auto recycled = std::move(buffer_.front());
    buffer_.pop_front();
    std::copy(row.begin(), row.end(), recycled.begin());
    buffer_.push_back(std::move(recycled));
  } else {
    buffer_.emplace_back(row.begin(), row.end());
  }

  std::fill(mean_.begin(), mean_.end(), 0.0);
  for (const auto& r : buffer_) {
    for (std::size_t d = 0; d < dim_; ++d) mean_[d] += r[d];
  }
  const auto n = static_cast<double>(buffer_.size());
  for (auto& m : mean_) m /= n;
  return mean_;
}

void CausalSmoother::reset() { buffer_.clear(); }

ObservationSequence smooth(const ObservationSequence& obs, SmoothingConfig cfg) {
  CausalSmoother smoother(obs.dim(), cfg);
  std::vector<double> out;
  out.reserve(obs.data().size());
  for (std::size_t t = 0; t < obs.size(); ++t) {
    auto m = smoother.push(obs.row(t));
    out.insert(out.end(), m.begin(), m.end());
  }
  return ObservationSequence(std::move(out), obs.dim(), obs.fps());
}

}  // namespace phasehmm
