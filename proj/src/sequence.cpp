#include "phasehmm/sequence.hpp"

#include <cmath>
#include <set>

#include "phasehmm/error.hpp"

namespace phasehmm {

namespace {

void check_fps(double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw Error(ErrorKind::InvalidArgument, "fps must be positive, got " + std::to_string(fps));
  }
}

void check_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "observation entries must be finite");
    }
  }
}

}  // namespace

PhaseSet::PhaseSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "phase set needs at least one phase");
  }
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorKind::InvalidArgument, "phase names must be non-empty");
    if (!seen.insert(n).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate phase name '" + n + "'");
    }
  }
}

PhaseSet PhaseSet::m2cai() {
  return PhaseSet({"TrocarPlacement", "Preparation", "CalotTriangleDissection",
                   "ClippingCutting", "GallbladderDissection", "GallbladderPackaging",
                   "CleaningCoagulation", "GallbladderRetraction"});
}

PhaseSet PhaseSet::numbered(std::size_t k) {
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 0; i < k; ++i) names.push_back("Phase" + std::to_string(i));
  return PhaseSet(std::move(names));
}

const std::string& PhaseSet::name(PhaseIndex k) const {
  if (k >= names_.size()) {
    throw Error(ErrorKind::OutOfRange, "phase index " + std::to_string(k) + " >= " +
                                           std::to_string(names_.size()));
  }
  return names_[k];
}

std::optional<PhaseIndex> PhaseSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

ObservationSequence::ObservationSequence(std::size_t dim, double fps) : dim_(dim), fps_(fps) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "observation dimension must be >= 1");
  check_fps(fps_);
}

ObservationSequence::ObservationSequence(std::vector<double> data, std::size_t dim, double fps)
    : data_(std::move(data)), dim_(dim), fps_(fps) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "observation dimension must be >= 1");
  check_fps(fps_);
  if (data_.size() % dim_ != 0) {
    throw Error(ErrorKind::RaggedRows, "data size is not a multiple of the dimension");
  }
  check_finite(data_);
}

ObservationSequence ObservationSequence::from_rows(const std::vector<std::vector<double>>& rows,
                                                  double fps) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "from_rows needs at least one row");
  ObservationSequence obs(rows.front().size(), fps);
  obs.data_.reserve(rows.size() * obs.dim_);
  for (const auto& r : rows) obs.push_back(r);
  return obs;
}

std::span<const double> ObservationSequence::row(std::size_t t) const {
  return std::span<const double>(data_).subspan(t * dim_, dim_);
}

void ObservationSequence::push_back(std::span<const double> row) {
  if (row.size() != dim_) {
    throw Error(ErrorKind::RaggedRows, "row has " + std::to_string(row.size()) +
                                           " entries, expected " + std::to_string(dim_));
  }
  check_finite(row);
  data_.insert(data_.end(), row.begin(), row.end());
}

LabelSequence::LabelSequence(double fps) : fps_(fps) { check_fps(fps_); }

LabelSequence::LabelSequence(std::vector<PhaseIndex> labels, double fps)
    : labels_(std::move(labels)), fps_(fps) {
  check_fps(fps_);
}

void LabelSequence::check_labels(std::size_t k) const {
  for (std::size_t t = 0; t < labels_.size(); ++t) {
    if (labels_[t] >= k) {
      throw Error(ErrorKind::OutOfRange, "label " + std::to_string(labels_[t]) + " at frame " +
                                             std::to_string(t) + " is not below K=" +
                                             std::to_string(k));
    }
  }
}

namespace {

void check_lengths_and_fps(std::size_t a, double fps_a, std::size_t b, double fps_b) {
  if (a != b) {
    throw Error(ErrorKind::LengthMismatch,
                "lengths differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (fps_a != fps_b) {
    throw Error(ErrorKind::FpsMismatch,
                "frame rates differ: " + std::to_string(fps_a) + " vs " + std::to_string(fps_b));
  }
}

}  // namespace

void validate_pair(const ObservationSequence& obs, const LabelSequence& labels) {
  check_lengths_and_fps(obs.size(), obs.fps(), labels.size(), labels.fps());
}

void validate_pair(const LabelSequence& pred, const LabelSequence& gt) {
  check_lengths_and_fps(pred.size(), pred.fps(), gt.size(), gt.fps());
}

PhaseIndex argmax(std::span<const double> values) {
  PhaseIndex best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

LabelSequence argmax_labels(const ObservationSequence& obs, std::size_t k) {
  if (obs.dim() != k) {
    throw Error(ErrorKind::DimensionMismatch, "observation dimension " +
                                                  std::to_string(obs.dim()) +
                                                  " differs from K=" + std::to_string(k));
  }
  std::vector<PhaseIndex> labels(obs.size());
  for (std::size_t t = 0; t < obs.size(); ++t) labels[t] = argmax(obs.row(t));
  return LabelSequence(std::move(labels), obs.fps());
}

ObservationSequence prefix(const ObservationSequence& obs, std::size_t t) {
  if (t > obs.size()) {
    throw Error(ErrorKind::OutOfRange, "prefix length " + std::to_string(t) + " exceeds T=" +
                                           std::to_string(obs.size()));
  }
  auto d = obs.data();
  return ObservationSequence(std::vector<double>(d.begin(), d.begin() + t * obs.dim()),
                             obs.dim(), obs.fps());
}

}  // namespace phasehmm
