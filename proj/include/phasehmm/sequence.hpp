#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phasehmm {

using PhaseIndex = std::size_t;

/// Ordered vocabulary of phase names. Index i of the set is hidden state i.
class PhaseSet {
 public:
  explicit PhaseSet(std::vector<std::string> names);

  /// The eight cholecystectomy phases of the M2CAI workflow challenge.
  static PhaseSet m2cai();
  /// K generic names "Phase0" .. "Phase{K-1}".
  static PhaseSet numbered(std::size_t k);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(PhaseIndex k) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<PhaseIndex> index_of(std::string_view name) const;

  bool operator==(const PhaseSet&) const = default;

 private:
  std::vector<std::string> names_;
};

/// T x D row-major matrix of per-frame observation vectors at a fixed rate.
class ObservationSequence {
 public:
  ObservationSequence(std::size_t dim, double fps);
  ObservationSequence(std::vector<double> data, std::size_t dim, double fps);
  /// Dimension taken from the first row; rows must be non-empty.
  static ObservationSequence from_rows(const std::vector<std::vector<double>>& rows, double fps);

  std::size_t size() const noexcept { return data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  double fps() const noexcept { return fps_; }

  std::span<const double> row(std::size_t t) const;
  double at(std::size_t t, std::size_t d) const { return data_[t * dim_ + d]; }
  std::span<const double> data() const noexcept { return data_; }

  void push_back(std::span<const double> row);

  bool operator==(const ObservationSequence&) const = default;

 private:
  std::vector<double> data_;
  std::size_t dim_;
  double fps_;
};

/// Per-frame phase indices at a fixed rate.
class LabelSequence {
 public:
  explicit LabelSequence(double fps);
  LabelSequence(std::vector<PhaseIndex> labels, double fps);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  double fps() const noexcept { return fps_; }
  PhaseIndex operator[](std::size_t t) const { return labels_[t]; }
  const std::vector<PhaseIndex>& labels() const noexcept { return labels_; }

  /// Throws OutOfRange unless every label is below k.
  void check_labels(std::size_t k) const;

  void push_back(PhaseIndex label) { labels_.push_back(label); }

  bool operator==(const LabelSequence&) const = default;

 private:
  std::vector<PhaseIndex> labels_;
  double fps_;
};

void validate_pair(const ObservationSequence& obs, const LabelSequence& labels);
void validate_pair(const LabelSequence& pred, const LabelSequence& gt);

/// Row-wise argmax; ties go to the lowest index. Requires obs.dim() == k.
LabelSequence argmax_labels(const ObservationSequence& obs, std::size_t k);

/// Index of the largest entry, lowest index on ties.
PhaseIndex argmax(std::span<const double> values);

ObservationSequence prefix(const ObservationSequence& obs, std::size_t t);

}  // namespace phasehmm
