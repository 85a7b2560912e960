#include "phasehmm/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "phasehmm/error.hpp"

namespace phasehmm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

Error parse_error(const std::string& source, std::size_t line_no, const std::string& what) {
  return Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": " + what);
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void check_frame(std::size_t got, std::size_t expected, const std::string& source,
                 std::size_t line_no) {
  if (got != expected) {
    throw Error(ErrorKind::NonContiguousFrames, source + ":" + std::to_string(line_no) +
                                                    ": frame " + std::to_string(got) +
                                                    ", expected " + std::to_string(expected));
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

FeatureFormat detect_format(const fs::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? FeatureFormat::Jsonl : FeatureFormat::Csv;
}

// ---------------------------------------------------------------------------

FeatureReader::FeatureReader(std::istream& in, FeatureFormat format, std::string source)
    : in_(in), format_(format), source_(std::move(source)) {
  if (format_ != FeatureFormat::Csv) return;
  std::string header;
  if (!next_line(header)) throw parse_error(source_, 1, "missing header");
  const auto fields = split_commas(header);
  if (fields.size() < 2 || fields[0] != "frame") {
    throw parse_error(source_, line_no_, "header must be frame,c0,...,c{D-1}");
  }
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (fields[i] != "c" + std::to_string(i - 1)) {
      throw parse_error(source_, line_no_, "unexpected header column '" +
                                               std::string(fields[i]) + "'");
    }
  }
  dim_ = fields.size() - 1;
}

bool FeatureReader::next_line(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line_no_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::optional<std::vector<double>> FeatureReader::next() {
  std::string line;
  if (!next_line(line)) return std::nullopt;

  std::vector<double> row;
  std::size_t frame = 0;
  if (format_ == FeatureFormat::Csv) {
    const auto fields = split_commas(line);
    if (fields.size() != *dim_ + 1) {
      throw Error(ErrorKind::RaggedRows, source_ + ":" + std::to_string(line_no_) + ": " +
                                             std::to_string(fields.size() - 1) +
                                             " scores, expected " + std::to_string(*dim_));
    }
    auto f = parse_number<std::size_t>(fields[0]);
    if (!f) throw parse_error(source_, line_no_, "bad frame index '" + std::string(fields[0]) + "'");
    frame = *f;
    row.reserve(*dim_);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto v = parse_number<double>(fields[i]);
      if (!v || !std::isfinite(*v)) {
        throw parse_error(source_, line_no_, "bad score '" + std::string(fields[i]) + "'");
      }
      row.push_back(*v);
    }
  } else {
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw parse_error(source_, line_no_, e.what());
    }
    if (!obj.is_object() || !obj.contains("frame") || !obj.contains("scores") ||
        !obj["frame"].is_number_unsigned() || !obj["scores"].is_array()) {
      throw parse_error(source_, line_no_, "expected {\"frame\": n, \"scores\": [...]}");
    }
    frame = obj["frame"].get<std::size_t>();
    for (const auto& v : obj["scores"]) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        throw parse_error(source_, line_no_, "scores must be finite numbers");
      }
      row.push_back(v.get<double>());
    }
    if (row.empty()) throw parse_error(source_, line_no_, "empty scores array");
    if (!dim_) dim_ = row.size();
    if (row.size() != *dim_) {
      throw Error(ErrorKind::RaggedRows, source_ + ":" + std::to_string(line_no_) + ": " +
                                             std::to_string(row.size()) + " scores, expected " +
                                             std::to_string(*dim_));
    }
  }
  check_frame(frame, frames_, source_, line_no_);
  ++frames_;
  return row;
}

ObservationSequence read_logprobs(std::istream& in, FeatureFormat format, double fps,
                                  const std::string& source) {
  FeatureReader reader(in, format, source);
  std::vector<double> data;
  std::size_t dim = reader.dim().value_or(0);
  while (auto row = reader.next()) {
    dim = row->size();
    data.insert(data.end(), row->begin(), row->end());
  }
  // An empty JSONL file carries no dimension; it is read as a 1-column sequence.
  return ObservationSequence(std::move(data), dim == 0 ? 1 : dim, fps);
}

ObservationSequence read_logprobs(const fs::path& path, double fps) {
  if (path == "-") return read_logprobs(std::cin, FeatureFormat::Csv, fps, "<stdin>");
  auto in = open_in(path);
  return read_logprobs(in, detect_format(path), fps, path.string());
}

void write_logprobs(std::ostream& out, const ObservationSequence& obs) {
  out << "frame";
  for (std::size_t d = 0; d < obs.dim(); ++d) out << ",c" << d;
  out << '\n';
  for (std::size_t t = 0; t < obs.size(); ++t) {
    out << t;
    for (double v : obs.row(t)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_logprobs(const fs::path& path, const ObservationSequence& obs) {
  if (path == "-") {
    write_logprobs(std::cout, obs);
    return;
  }
  auto out = open_out(path);
  write_logprobs(out, obs);
  finish_write(out, path);
}

// ---------------------------------------------------------------------------

LabelSequence read_labels(std::istream& in, const PhaseSet& phases, double fps,
                          const std::string& source) {
  LabelSequence labels(fps);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (!header) {
      if (fields.size() != 2 || fields[0] != "frame" || fields[1] != "phase") {
        throw parse_error(source, line_no, "header must be frame,phase");
      }
      header = true;
      continue;
    }
    if (fields.size() != 2) throw parse_error(source, line_no, "expected frame,phase");
    auto frame = parse_number<std::size_t>(fields[0]);
    if (!frame) throw parse_error(source, line_no, "bad frame index '" + std::string(fields[0]) + "'");
    check_frame(*frame, labels.size(), source, line_no);

    PhaseIndex phase = 0;
    if (auto idx = parse_number<std::size_t>(fields[1])) {
      if (*idx >= phases.size()) {
        throw parse_error(source, line_no, "phase index " + std::to_string(*idx) +
                                               " out of range for K=" +
                                               std::to_string(phases.size()));
      }
      phase = *idx;
    } else if (auto named = phases.index_of(fields[1])) {
      phase = *named;
    } else {
      throw parse_error(source, line_no, "unknown phase '" + std::string(fields[1]) + "'");
    }
    labels.push_back(phase);
  }
  if (!header) throw parse_error(source, 1, "missing header");
  return labels;
}

LabelSequence read_labels(const fs::path& path, const PhaseSet& phases, double fps) {
  if (path == "-") return read_labels(std::cin, phases, fps, "<stdin>");
  auto in = open_in(path);
  return read_labels(in, phases, fps, path.string());
}

void write_labels(std::ostream& out, const LabelSequence& labels, const PhaseSet& phases,
                  bool names) {
  labels.check_labels(phases.size());
  out << "frame,phase\n";
  for (std::size_t t = 0; t < labels.size(); ++t) {
    out << t << ',';
    if (names) {
      out << phases.name(labels[t]);
    } else {
      out << labels[t];
    }
    out << '\n';
  }
}

void write_labels(const fs::path& path, const LabelSequence& labels, const PhaseSet& phases,
                  bool names) {
  if (path == "-") {
    write_labels(std::cout, labels, phases, names);
    return;
  }
  auto out = open_out(path);
  write_labels(out, labels, phases, names);
  finish_write(out, path);
}

LabelSequence upsample(const LabelSequence& pred, std::size_t factor, std::size_t target_frames) {
  if (factor < 1) throw Error(ErrorKind::InvalidArgument, "upsample factor must be >= 1");
  if (pred.empty() && target_frames > 0) {
    throw Error(ErrorKind::EmptyInputWithPositiveTarget,
                "cannot pad an empty prediction to " + std::to_string(target_frames) + " frames");
  }
  std::vector<PhaseIndex> out;
  out.reserve(target_frames);
  for (std::size_t t = 0; t < pred.size() && out.size() < target_frames; ++t) {
    const std::size_t n = std::min(factor, target_frames - out.size());
    out.insert(out.end(), n, pred[t]);
  }
  if (out.size() < target_frames) out.resize(target_frames, pred[pred.size() - 1]);
  return LabelSequence(std::move(out), pred.fps() * static_cast<double>(factor));
}

// ---------------------------------------------------------------------------

std::string model_to_json(const ModelFile& file) {
  const auto& m = file.model;
  const auto k = static_cast<Eigen::Index>(m.num_states());
  const auto d = static_cast<Eigen::Index>(m.dim());
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["phases"] = file.phases.names();
  j["K"] = m.num_states();
  j["D"] = m.dim();
  j["initial"] = std::vector<double>(m.initial().data(), m.initial().data() + k);
  json transition = json::array();
  for (Eigen::Index i = 0; i < k; ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < k; ++c) row.push_back(m.transition()(i, c));
    transition.push_back(std::move(row));
  }
  j["transition"] = std::move(transition);
  json means = json::array();
  json covs = json::array();
  for (Eigen::Index s = 0; s < k; ++s) {
    const auto& mu = m.means()[static_cast<std::size_t>(s)];
    means.push_back(std::vector<double>(mu.data(), mu.data() + d));
    const auto& cov = m.covariances()[static_cast<std::size_t>(s)];
    json rows = json::array();
    for (Eigen::Index r = 0; r < d; ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < d; ++c) row.push_back(cov(r, c));
      rows.push_back(std::move(row));
    }
    covs.push_back(std::move(rows));
  }
  j["means"] = std::move(means);
  j["covariances"] = std::move(covs);
  return j.dump(2) + "\n";
}

namespace {

std::vector<double> number_array(const json& j, std::size_t expected, const std::string& what) {
  if (!j.is_array() || j.size() != expected) {
    throw Error(ErrorKind::Parse, what + " must be an array of " + std::to_string(expected) +
                                      " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorKind::Parse, what + " contains a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

ModelFile model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Parse, "model file must be a JSON object");
  const auto& version = field(j, "schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kModelSchemaVersion) {
    throw Error(ErrorKind::Parse, "unsupported schema_version " + version.dump() +
                                      " (supported: " + std::to_string(kModelSchemaVersion) +
                                      ")");
  }
  const auto& kj = field(j, "K");
  const auto& dj = field(j, "D");
  if (!kj.is_number_unsigned() || !dj.is_number_unsigned()) {
    throw Error(ErrorKind::Parse, "K and D must be non-negative integers");
  }
  const auto k = kj.get<std::size_t>();
  const auto d = dj.get<std::size_t>();
  if (k < 1 || d < 1) throw Error(ErrorKind::InvariantViolation, "K and D must be >= 1");

  const auto& phases_j = field(j, "phases");
  if (!phases_j.is_array() || phases_j.size() != k) {
    throw Error(ErrorKind::Parse, "phases must list K names");
  }
  std::vector<std::string> names;
  for (const auto& n : phases_j) {
    if (!n.is_string()) throw Error(ErrorKind::Parse, "phase names must be strings");
    names.push_back(n.get<std::string>());
  }
  std::optional<PhaseSet> phases;
  try {
    phases.emplace(std::move(names));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvariantViolation, e.detail());
  }

  const auto kk = static_cast<Eigen::Index>(k);
  const auto dd = static_cast<Eigen::Index>(d);
  const auto initial = number_array(field(j, "initial"), k, "initial");
  Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(initial.data(), kk);

  const auto& tj = field(j, "transition");
  if (!tj.is_array() || tj.size() != k) throw Error(ErrorKind::Parse, "transition must be K x K");
  Eigen::MatrixXd a(kk, kk);
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = number_array(tj[i], k, "transition row " + std::to_string(i));
    for (std::size_t c = 0; c < k; ++c) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    }
  }

  const auto& mj = field(j, "means");
  const auto& cj = field(j, "covariances");
  if (!mj.is_array() || mj.size() != k) throw Error(ErrorKind::Parse, "means must have K rows");
  if (!cj.is_array() || cj.size() != k) throw Error(ErrorKind::Parse, "covariances must have K entries");
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (std::size_t s = 0; s < k; ++s) {
    const auto mu = number_array(mj[s], d, "mean " + std::to_string(s));
    means.emplace_back(Eigen::Map<const Eigen::VectorXd>(mu.data(), dd));
    const auto& cs = cj[s];
    if (!cs.is_array() || cs.size() != d) {
      throw Error(ErrorKind::Parse, "covariance " + std::to_string(s) + " must be D x D");
    }
    Eigen::MatrixXd cov(dd, dd);
    for (std::size_t r = 0; r < d; ++r) {
      const auto row = number_array(cs[r], d, "covariance " + std::to_string(s) + " row");
      for (std::size_t c = 0; c < d; ++c) {
        cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
      }
    }
    covs.push_back(std::move(cov));
  }
  return ModelFile{std::move(*phases),
                   HmmModel(std::move(pi), std::move(a), std::move(means), std::move(covs))};
}

void save_model(const ModelFile& file, const fs::path& path) {
  if (file.phases.size() != file.model.num_states()) {
    throw Error(ErrorKind::InvariantViolation, "phase set size differs from model K");
  }
  auto out = open_out(path);
  out << model_to_json(file);
  finish_write(out, path);
}

ModelFile load_model(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return model_from_json(buffer.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

// ---------------------------------------------------------------------------

void write_frame_dump(std::ostream& out, const std::vector<FrameRecord>& records) {
  out << "frame,time_s,pred,gt,match\n";
  for (const auto& r : records) {
    out << r.frame << ',' << format_double(r.time_s) << ',' << r.pred << ',' << r.gt << ','
        << (r.match ? "true" : "false") << '\n';
  }
}

void write_frame_dump(const fs::path& path, const std::vector<FrameRecord>& records) {
  auto out = open_out(path);
  write_frame_dump(out, records);
  finish_write(out, path);
}

}  // namespace phasehmm
