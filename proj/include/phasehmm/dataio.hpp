#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phasehmm/hmm.hpp"
#include "phasehmm/metrics.hpp"
#include "phasehmm/sequence.hpp"

namespace phasehmm {

inline constexpr double kDefaultAnalysisFps = 1.0;
inline constexpr std::size_t kDefaultUpsampleFactor = 25;
inline constexpr int kModelSchemaVersion = 1;

enum class FeatureFormat { Csv, Jsonl };

/// JSONL for *.jsonl / *.ndjson, CSV otherwise.
FeatureFormat detect_format(const std::filesystem::path& path);

/*!
 * Incremental feature reader. Rows are parsed one at a time from the stream,
 * so a consumer that needs frame t never forces frame t+1 to be read.
 *
 * CSV: mandatory header `frame,c0,...,c{D-1}`. JSONL: one
 * `{"frame": n, "scores": [...]}` object per line. Frame indices must run
 * 0, 1, 2, ... without gaps.
 */
class FeatureReader {
 public:
  FeatureReader(std::istream& in, FeatureFormat format, std::string source = "<stream>");

  /// Next row, or nullopt at end of input.
  std::optional<std::vector<double>> next();

  /// Known after the CSV header or the first JSONL row.
  std::optional<std::size_t> dim() const noexcept { return dim_; }

 private:
  bool next_line(std::string& line);

  std::istream& in_;
  FeatureFormat format_;
  std::string source_;
  std::size_t line_no_ = 0;
  std::size_t frames_ = 0;
  std::optional<std::size_t> dim_;
};

ObservationSequence read_logprobs(std::istream& in, FeatureFormat format,
                                  double fps = kDefaultAnalysisFps,
                                  const std::string& source = "<stream>");
/// A path of "-" reads standard input as CSV.
ObservationSequence read_logprobs(const std::filesystem::path& path,
                                  double fps = kDefaultAnalysisFps);

void write_logprobs(std::ostream& out, const ObservationSequence& obs);
void write_logprobs(const std::filesystem::path& path, const ObservationSequence& obs);

/// Label CSV `frame,phase`; phase is an integer index or an exact phase name.
LabelSequence read_labels(std::istream& in, const PhaseSet& phases,
                          double fps = kDefaultAnalysisFps,
                          const std::string& source = "<stream>");
LabelSequence read_labels(const std::filesystem::path& path, const PhaseSet& phases,
                          double fps = kDefaultAnalysisFps);

void write_labels(std::ostream& out, const LabelSequence& labels, const PhaseSet& phases,
                  bool names = false);
void write_labels(const std::filesystem::path& path, const LabelSequence& labels,
                  const PhaseSet& phases, bool names = false);

/// Repeats each label `factor` times, then crops to target_frames or pads by
/// repeating the final label. Output fps is input fps times factor.
LabelSequence upsample(const LabelSequence& pred, std::size_t factor, std::size_t target_frames);

struct ModelFile {
  PhaseSet phases;
  HmmModel model;
};

std::string model_to_json(const ModelFile& file);
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// CSV `frame,time_s,pred,gt,match`.
void write_frame_dump(std::ostream& out, const std::vector<FrameRecord>& records);
void write_frame_dump(const std::filesystem::path& path, const std::vector<FrameRecord>& records);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace phasehmm
