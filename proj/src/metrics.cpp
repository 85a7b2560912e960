#include "phasehmm/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "phasehmm/error.hpp"

namespace phasehmm {

double accuracy(const LabelSequence& pred, const LabelSequence& gt) {
  validate_pair(pred, gt);
  if (pred.empty()) throw Error(ErrorKind::EmptySequence, "accuracy of empty sequences");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) hits += pred[t] == gt[t] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::size_t margin_frames(double margin_seconds, double fps) {
  if (!(margin_seconds >= 0.0) || !std::isfinite(margin_seconds)) {
    throw Error(ErrorKind::InvalidArgument, "margin must be a non-negative number of seconds");
  }
  return static_cast<std::size_t>(std::llround(margin_seconds * fps));
}

std::vector<std::optional<double>> jaccard_per_class(const LabelSequence& pred,
                                                     const LabelSequence& gt, std::size_t k,
                                                     double margin_seconds) {
  validate_pair(pred, gt);
  pred.check_labels(k);
  gt.check_labels(k);
  const std::size_t m = margin_frames(margin_seconds, pred.fps());
  const std::size_t n = pred.size();

  // gt_prefix[c][t] = #{t' < t : gt(t') = c}
  std::vector<std::vector<std::size_t>> gt_prefix(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t t = 0; t < n; ++t) gt_prefix[c][t + 1] = gt_prefix[c][t] + (gt[t] == c);
  }

  std::vector<std::size_t> hits(k, 0), exact(k, 0), predicted(k, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const PhaseIndex c = pred[t];
    ++predicted[c];
    if (gt[t] == c) ++exact[c];
    const std::size_t lo = t >= m ? t - m : 0;
    const std::size_t hi = std::min(n, t + m + 1);
    if (gt_prefix[c][hi] > gt_prefix[c][lo]) ++hits[c];
  }

  std::vector<std::optional<double>> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t truth = gt_prefix[c][n];
    const std::size_t uni = predicted[c] + truth - exact[c];
    if (uni == 0) continue;
    out[c] = 100.0 * static_cast<double>(hits[c]) / static_cast<double>(uni);
  }
  return out;
}

MeanStd mean_std(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return {};
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const auto& v : values) {
    if (v) sq += (*v - mean) * (*v - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(n))};
}

EvalReport summarize(const LabelSequence& pred, const LabelSequence& gt, std::size_t k,
                     double margin_seconds) {
  EvalReport report;
  report.accuracy = accuracy(pred, gt);
  report.per_class_jaccard = jaccard_per_class(pred, gt, k, margin_seconds);
  const auto agg = mean_std(report.per_class_jaccard);
  report.jaccard_mean = agg.mean;
  report.jaccard_std = agg.std;
  report.margin_seconds = margin_seconds;
  return report;
}

std::vector<FrameRecord> dump_frames(const LabelSequence& pred, const LabelSequence& gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorKind::LengthMismatch, "lengths differ: " + std::to_string(pred.size()) +
                                               " vs " + std::to_string(gt.size()));
  }
  std::vector<FrameRecord> records;
  records.reserve(pred.size());
  for (std::size_t t = 0; t < pred.size(); ++t) {
    records.push_back({t, static_cast<double>(t) / pred.fps(), pred[t], gt[t], pred[t] == gt[t]});
  }
  return records;
}

}  // namespace phasehmm
