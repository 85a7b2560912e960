#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "phasehmm/sequence.hpp"

namespace phasehmm {

inline constexpr double kDefaultMarginSeconds = 10.0;

/// Percent of frames where pred equals gt.
double accuracy(const LabelSequence& pred, const LabelSequence& gt);

/// Frames of tolerance for a margin given in seconds at the sequences' rate.
std::size_t margin_frames(double margin_seconds, double fps);

/*!
 * Per-class Jaccard (percent) with a boundary margin of m = round(margin * fps)
 * frames.
 *
 * A predicted frame t with pred(t) = c counts as a hit for c when gt equals c
 * anywhere in [t - m, t + m]. J_c = 100 * hits_c / |pred^-1(c) U gt^-1(c)|.
 * With m = 0 this is the plain intersection-over-union. Classes absent from
 * both sequences come back as std::nullopt.
 */
std::vector<std::optional<double>> jaccard_per_class(const LabelSequence& pred,
                                                     const LabelSequence& gt, std::size_t k,
                                                     double margin_seconds);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::optional<double>> per_class_jaccard;
  double jaccard_mean = 0.0;
  double jaccard_std = 0.0;  // population std over defined classes
  double margin_seconds = 0.0;
};

EvalReport summarize(const LabelSequence& pred, const LabelSequence& gt, std::size_t k,
                     double margin_seconds = kDefaultMarginSeconds);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and population standard deviation over the defined entries.
MeanStd mean_std(const std::vector<std::optional<double>>& values);

struct FrameRecord {
  std::size_t frame;
  double time_s;
  PhaseIndex pred;
  PhaseIndex gt;
  bool match;

  bool operator==(const FrameRecord&) const = default;
};

std::vector<FrameRecord> dump_frames(const LabelSequence& pred, const LabelSequence& gt);

}  // namespace phasehmm
