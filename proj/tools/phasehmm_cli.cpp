// phasehmm: smoothing, HMM training/decoding, evaluation and post-processing
// of per-frame phase scores.
//
// Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "phasehmm/dataio.hpp"
#include "phasehmm/error.hpp"
#include "phasehmm/hmm.hpp"
#include "phasehmm/metrics.hpp"
#include "phasehmm/smoothing.hpp"
#include "phasehmm/synthgen.hpp"

namespace fs = std::filesystem;
using namespace phasehmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

bool verbose() {
  const char* v = std::getenv("PHASEHMM_VERBOSE");
  return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::NoFeasiblePath:
    case ErrorKind::DegenerateCovariance:
      return kExitRuntime;
    default:
      return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// Phase vocabulary options shared by several subcommands.

struct PhaseOptions {
  std::string names;
  std::size_t count = 0;

  void add_to(CLI::App* app) {
    app->add_option("--phases", names, "Comma-separated phase names (default: the 8 M2CAI phases)");
    app->add_option("--num-phases", count, "Use K generic phase names Phase0..Phase{K-1}")
        ->check(CLI::PositiveNumber);
  }

  PhaseSet resolve() const {
    if (!names.empty() && count > 0) throw UsageError("--phases and --num-phases are exclusive");
    if (count > 0) return PhaseSet::numbered(count);
    if (names.empty()) return PhaseSet::m2cai();
    std::vector<std::string> list;
    std::stringstream ss(names);
    std::string item;
    while (std::getline(ss, item, ',')) list.push_back(item);
    return PhaseSet(std::move(list));
  }
};

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::vector<std::string> features;
  std::vector<std::string> labels;
  std::string manifest;
  std::string out;
  bool diag_cov = false;
  double fps = kDefaultAnalysisFps;
  std::size_t smooth_window = 0;
  PhaseOptions phases;
};

std::string stem_of(const fs::path& p) {
  const auto name = p.filename().string();
  return name.substr(0, name.find('.'));
}

bool has_data_extension(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".csv" || ext == ".jsonl" || ext == ".ndjson";
}

// Directories contribute their `*.<marker>.*` files, or every data file when
// none carries the marker.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs,
                                    const std::string& marker) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (!fs::is_directory(p)) {
      if (!fs::exists(p)) throw Error(ErrorKind::Io, "no such file or directory '" + in + "'");
      files.push_back(p);
      continue;
    }
    std::vector<fs::path> marked, all;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (!entry.is_regular_file() || !has_data_extension(entry.path())) continue;
      all.push_back(entry.path());
      if (entry.path().filename().string().find("." + marker + ".") != std::string::npos) {
        marked.push_back(entry.path());
      }
    }
    auto& chosen = marked.empty() ? all : marked;
    files.insert(files.end(), chosen.begin(), chosen.end());
  }
  return files;
}

std::vector<std::pair<fs::path, fs::path>> pair_inputs(const TrainOptions& opt) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (!opt.manifest.empty()) {
    std::ifstream in(opt.manifest);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest '" + opt.manifest + "'");
    const fs::path base = fs::path(opt.manifest).parent_path();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.starts_with('#')) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorKind::Parse, opt.manifest + ":" + std::to_string(line_no) +
                                          ": expected features_path,labels_path");
      }
      auto resolve = [&](fs::path p) { return p.is_absolute() ? p : base / p; };
      pairs.emplace_back(resolve(line.substr(0, comma)), resolve(line.substr(comma + 1)));
    }
    return pairs;
  }

  std::map<std::string, fs::path> feature_by_stem, label_by_stem;
  for (const auto& f : expand_inputs(opt.features, "features")) {
    if (!feature_by_stem.emplace(stem_of(f), f).second) {
      throw UsageError("duplicate feature stem '" + stem_of(f) + "'");
    }
  }
  for (const auto& f : expand_inputs(opt.labels, "labels")) {
    if (!label_by_stem.emplace(stem_of(f), f).second) {
      throw UsageError("duplicate label stem '" + stem_of(f) + "'");
    }
  }
  for (const auto& [stem, path] : feature_by_stem) {
    auto it = label_by_stem.find(stem);
    if (it == label_by_stem.end()) {
      throw Error(ErrorKind::MissingPartner, "no label file for stem '" + stem + "'");
    }
    pairs.emplace_back(path, it->second);
  }
  for (const auto& [stem, path] : label_by_stem) {
    if (!feature_by_stem.contains(stem)) {
      throw Error(ErrorKind::MissingPartner, "no feature file for stem '" + stem + "'");
    }
  }
  if (pairs.empty()) throw UsageError("no training files found");
  return pairs;
}

int cmd_train(const TrainOptions& opt) {
  if (opt.manifest.empty() && (opt.features.empty() || opt.labels.empty())) {
    throw UsageError("train needs --features and --labels, or --manifest");
  }
  const auto phases = opt.phases.resolve();
  const auto pairs = pair_inputs(opt);

  std::vector<ObservationSequence> obs;
  std::vector<LabelSequence> labels;
  for (const auto& [fpath, lpath] : pairs) {
    auto o = read_logprobs(fpath, opt.fps);
    if (opt.smooth_window > 0) o = smooth(o, SmoothingConfig{opt.smooth_window});
    auto l = read_labels(lpath, phases, opt.fps);
    try {
      validate_pair(o, l);
    } catch (const Error& e) {
      throw Error(e.kind(), stem_of(fpath) + ": " + e.detail());
    }
    if (verbose()) std::cerr << "loaded " << fpath << " (" << o.size() << " frames)\n";
    obs.push_back(std::move(o));
    labels.push_back(std::move(l));
  }

  EmissionFitOptions fit_opts;
  fit_opts.diagonal = opt.diag_cov;
  auto result = fit(obs, labels, phases.size(), fit_opts);
  save_model(ModelFile{phases, result.model}, opt.out);

  const auto& a = result.model.transition();
  const auto zeros = (a.array() == 0.0).count();
  std::cout << "sequences: " << pairs.size() << "\n"
            << "K: " << result.model.num_states() << "\n"
            << "D: " << result.model.dim() << "\n"
            << "frames per state:\n";
  for (std::size_t k = 0; k < phases.size(); ++k) {
    std::cout << "  " << k << "." << phases.name(k) << ": " << result.frame_counts[k] << "\n";
  }
  std::cout << "transition sparsity: " << zeros << "/" << a.size() << " zero entries ("
            << std::fixed << std::setprecision(2)
            << 100.0 * static_cast<double>(zeros) / static_cast<double>(a.size()) << "%)\n"
            << "model written to " << opt.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// smooth

struct SmoothOptions {
  std::string in;
  std::string out;
  std::size_t window = kDefaultSmoothingWindow;
  double fps = kDefaultAnalysisFps;
};

int cmd_smooth(const SmoothOptions& opt) {
  const auto obs = read_logprobs(opt.in, opt.fps);
  write_logprobs(opt.out, smooth(obs, SmoothingConfig{opt.window}));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeOptions {
  std::string model;
  std::string in;
  std::string out;
  std::string mode = "offline";
  std::size_t smooth_window = 0;
  double fps = kDefaultAnalysisFps;
  bool names = false;
};

// Reads, smooths and decodes one row at a time; each label is written before
// the next row is requested.
void decode_streaming(const ModelFile& mf, std::istream& in, FeatureFormat format,
                      const std::string& source, std::ostream& out, const DecodeOptions& opt) {
  FeatureReader reader(in, format, source);
  const std::size_t model_dim = mf.model.dim();
  auto check_dim = [&](std::size_t d) {
    if (d != model_dim) {
      throw Error(ErrorKind::DimensionMismatch, "features have D=" + std::to_string(d) +
                                                    ", model has D=" + std::to_string(model_dim));
    }
  };
  if (reader.dim()) check_dim(*reader.dim());

  OnlineDecoder decoder(mf.model);
  std::optional<CausalSmoother> smoother;
  if (opt.smooth_window > 0) smoother.emplace(model_dim, SmoothingConfig{opt.smooth_window});

  out << "frame,phase\n";
  std::size_t t = 0;
  while (auto row = reader.next()) {
    check_dim(row->size());
    std::span<const double> y = *row;
    if (smoother) y = smoother->push(y);
    const auto state = decoder.step(y);
    out << t++ << ',';
    if (opt.names) {
      out << mf.phases.name(state);
    } else {
      out << state;
    }
    out << '\n';
    out.flush();
  }
}

int cmd_decode(const DecodeOptions& opt) {
  const auto mf = load_model(opt.model);

  if (opt.mode == "online") {
    std::ifstream file;
    std::istream* in = &std::cin;
    FeatureFormat format = FeatureFormat::Csv;
    if (opt.in != "-") {
      file.open(opt.in, std::ios::binary);
      if (!file) throw Error(ErrorKind::Io, "cannot open '" + opt.in + "' for reading");
      in = &file;
      format = detect_format(opt.in);
    }
    if (opt.out == "-") {
      decode_streaming(mf, *in, format, opt.in, std::cout, opt);
    } else {
      std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::Io, "cannot open '" + opt.out + "' for writing");
      decode_streaming(mf, *in, format, opt.in, out, opt);
      if (!out) throw Error(ErrorKind::Io, "failed writing '" + opt.out + "'");
    }
    return kExitOk;
  }

  auto obs = read_logprobs(opt.in, opt.fps);
  if (obs.dim() != mf.model.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "features have D=" + std::to_string(obs.dim()) +
                                                  ", model has D=" +
                                                  std::to_string(mf.model.dim()));
  }
  if (opt.smooth_window > 0) obs = smooth(obs, SmoothingConfig{opt.smooth_window});
  const auto result = viterbi_offline(mf.model, obs);
  if (verbose()) std::cerr << "log joint: " << result.log_joint << "\n";
  write_labels(opt.out, result.states, mf.phases, opt.names);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string pred;
  std::string gt;
  double margin_seconds = kDefaultMarginSeconds;
  double fps = kDefaultAnalysisFps;
  std::string dump_frames;
  bool json = false;
  PhaseOptions phases;
};

std::string report_json(const EvalReport& report, const PhaseSet& phases) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["margin_seconds"] = report.margin_seconds;
  j["phases"] = phases.names();
  auto per_class = nlohmann::json::array();
  for (const auto& v : report.per_class_jaccard) {
    per_class.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  }
  j["per_class_jaccard"] = std::move(per_class);
  j["jaccard_mean"] = report.jaccard_mean;
  j["jaccard_std"] = report.jaccard_std;
  return j.dump(2);
}

void print_report(std::ostream& out, const EvalReport& report, const PhaseSet& phases) {
  std::size_t width = std::string("All classes").size();
  for (std::size_t k = 0; k < phases.size(); ++k) {
    width = std::max(width, std::to_string(k).size() + 1 + phases.name(k).size());
  }
  width += 2;
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(static_cast<int>(width)) << "Phase" << "Jaccard (%)\n";
  for (std::size_t k = 0; k < phases.size(); ++k) {
    out << std::left << std::setw(static_cast<int>(width))
        << (std::to_string(k) + "." + phases.name(k));
    if (const auto& j = report.per_class_jaccard[k]) {
      out << std::right << std::setw(11) << *j << "\n";
    } else {
      out << std::right << std::setw(11) << "n/a" << "\n";
    }
  }
  out << std::left << std::setw(static_cast<int>(width)) << "All classes" << std::right
      << std::setw(11) << report.jaccard_mean << " +/- " << report.jaccard_std << "\n";
  out << std::left << std::setw(static_cast<int>(width)) << "Accuracy" << std::right
      << std::setw(11) << report.accuracy << "\n";
  out << std::left << std::setw(static_cast<int>(width)) << "Margin (s)" << std::right
      << std::setw(11) << report.margin_seconds << "\n";
}

int cmd_eval(const EvalOptions& opt) {
  const auto phases = opt.phases.resolve();
  const auto pred = read_labels(opt.pred, phases, opt.fps);
  const auto gt = read_labels(opt.gt, phases, opt.fps);
  const auto report = summarize(pred, gt, phases.size(), opt.margin_seconds);
  if (!opt.dump_frames.empty()) write_frame_dump(opt.dump_frames, dump_frames(pred, gt));
  if (opt.json) {
    std::cout << report_json(report, phases) << "\n";
  } else {
    print_report(std::cout, report, phases);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// upsample

struct UpsampleOptions {
  std::string in;
  std::string out;
  std::size_t factor = kDefaultUpsampleFactor;
  std::size_t target_frames = 0;
  double fps = kDefaultAnalysisFps;
  bool names = false;
  PhaseOptions phases;
};

int cmd_upsample(const UpsampleOptions& opt) {
  const auto phases = opt.phases.resolve();
  const auto pred = read_labels(opt.in, phases, opt.fps);
  write_labels(opt.out, upsample(pred, opt.factor, opt.target_frames), phases, opt.names);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen / bench

struct ScenarioOptions {
  std::string config;
  ScenarioConfig values;
  std::vector<std::pair<CLI::Option*, std::function<void(ScenarioConfig&)>>> overrides;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "Scenario JSON file; flags given explicitly override it")
        ->check(CLI::ExistingFile);
    auto bind = [&](auto ScenarioConfig::*member, const char* name, const char* help) {
      auto* o = app->add_option(name, values.*member, help)->capture_default_str();
      overrides.emplace_back(o, [member, this](ScenarioConfig& cfg) {
        cfg.*member = values.*member;
      });
    };
    bind(&ScenarioConfig::num_states, "--states", "Number of phases K");
    bind(&ScenarioConfig::dim, "--dim", "Observation dimension D");
    bind(&ScenarioConfig::length, "--frames", "Frames per sequence T");
    bind(&ScenarioConfig::n_train, "--n-train", "Training sequences");
    bind(&ScenarioConfig::n_test, "--n-test", "Test sequences");
    bind(&ScenarioConfig::noise_scale, "--noise", "Emission covariance multiplier");
    bind(&ScenarioConfig::dwell, "--dwell", "Expected phase duration in frames");
    bind(&ScenarioConfig::seed, "--seed", "Random seed");
    bind(&ScenarioConfig::fps, "--fps", "Frame rate of the generated sequences");
    bind(&ScenarioConfig::window, "--window", "Smoothing window for bench");
    bind(&ScenarioConfig::margin_seconds, "--margin-seconds", "Jaccard margin for bench");
  }

  ScenarioConfig resolve() const {
    ScenarioConfig cfg;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw Error(ErrorKind::Io, "cannot open '" + config + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = scenario_from_json(buf.str(), cfg);
    }
    for (const auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(cfg);
    }
    cfg.validate();
    return cfg;
  }
};

struct GenOptions {
  ScenarioOptions scenario;
  std::string out;
};

int cmd_gen(const GenOptions& opt) {
  const auto cfg = opt.scenario.resolve();
  const auto ds = generate(cfg);
  const fs::path root(opt.out);
  const auto phases = PhaseSet::numbered(cfg.num_states);
  fs::create_directories(root / "train");
  fs::create_directories(root / "test");
  auto write_split = [&](const std::vector<SampledSequence>& split, const fs::path& dir) {
    for (std::size_t i = 0; i < split.size(); ++i) {
      std::ostringstream stem;
      stem << "video" << std::setw(2) << std::setfill('0') << (i + 1);
      write_logprobs(dir / (stem.str() + ".features.csv"), split[i].observations);
      write_labels(dir / (stem.str() + ".labels.csv"), split[i].labels, phases);
    }
  };
  write_split(ds.train, root / "train");
  write_split(ds.test, root / "test");
  save_model(ModelFile{phases, ds.truth}, root / "truth.model.json");
  {
    std::ofstream out(root / "scenario.json", std::ios::binary | std::ios::trunc);
    out << scenario_to_json(cfg) << "\n";
    if (!out) throw Error(ErrorKind::Io, "failed writing scenario.json");
  }
  std::cout << "wrote " << ds.train.size() << " train and " << ds.test.size()
            << " test sequences to " << root.string() << "\n";
  return kExitOk;
}

struct BenchOptions {
  ScenarioOptions scenario;
  std::size_t seeds = 10;
};

int cmd_bench(const BenchOptions& opt) {
  const auto base = opt.scenario.resolve();
  std::size_t acc_ok = 0;
  std::size_t jac_ok = 0;
  std::cout << std::fixed << std::setprecision(2);
  for (std::size_t i = 0; i < opt.seeds; ++i) {
    auto cfg = base;
    cfg.seed = base.seed + i;
    const auto result = run_experiment(cfg);
    std::cout << "seed " << cfg.seed << "\n";
    std::cout << "  " << std::left << std::setw(16) << "Temporal Method" << std::right
              << std::setw(20) << "Accuracy (%)" << std::setw(20) << "Jaccard" << "\n";
    for (const auto& m : result.methods) {
      std::ostringstream acc, jac;
      acc << std::fixed << std::setprecision(2) << m.accuracy << " +/- " << m.accuracy_std;
      jac << std::fixed << std::setprecision(2) << m.jaccard << " +/- " << m.jaccard_std;
      std::cout << "  " << std::left << std::setw(16) << m.name << std::right << std::setw(20)
                << acc.str() << std::setw(20) << jac.str() << "\n";
    }
    const bool a = result.accuracy_ordered();
    const bool j = result.jaccard_ordered();
    acc_ok += a;
    jac_ok += j;
    std::cout << "  ordering offline >= online >= smoothing: accuracy "
              << (a ? "yes" : "no") << ", jaccard " << (j ? "yes" : "no") << "\n";
  }
  std::cout << "accuracy ordering held in " << acc_ok << "/" << opt.seeds << " seeds\n"
            << "jaccard ordering held in " << jac_ok << "/" << opt.seeds << " seeds\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal smoothing and HMM decoding of per-frame phase scores"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Fit an HMM on paired feature/label files");
  train_cmd->add_option("--features", train.features, "Feature files or directories");
  train_cmd->add_option("--labels", train.labels, "Label files or directories");
  train_cmd->add_option("--manifest", train.manifest, "CSV of features_path,labels_path pairs");
  train_cmd->add_option("--out", train.out, "Output model JSON")->required();
  train_cmd->add_flag("--diag-cov", train.diag_cov, "Fit diagonal emission covariances");
  train_cmd->add_option("--fps", train.fps, "Frame rate of the inputs")
      ->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--smooth-window", train.smooth_window,
                        "Smooth features with this window before fitting (0: off)");
  train.phases.add_to(train_cmd);

  SmoothOptions smooth_opt;
  auto* smooth_cmd = app.add_subcommand("smooth", "Causal trailing-window mean of feature rows");
  smooth_cmd->add_option("--in", smooth_opt.in, "Input features (- for stdin)")->required();
  smooth_cmd->add_option("--out", smooth_opt.out, "Output features CSV (- for stdout)")->required();
  smooth_cmd->add_option("--window", smooth_opt.window, "Window length in frames")
      ->check(CLI::PositiveNumber)->capture_default_str();
  smooth_cmd->add_option("--fps", smooth_opt.fps, "Frame rate")->check(CLI::PositiveNumber);

  DecodeOptions decode;
  auto* decode_cmd = app.add_subcommand("decode", "Decode features into phase labels");
  decode_cmd->add_option("--model", decode.model, "Model JSON")->required();
  decode_cmd->add_option("--in", decode.in, "Input features (- for stdin)")->required();
  decode_cmd->add_option("--out", decode.out, "Output labels CSV (- for stdout)")->required();
  decode_cmd->add_option("--mode", decode.mode, "offline or online")
      ->check(CLI::IsMember({"offline", "online"}))->capture_default_str();
  decode_cmd->add_option("--smooth-window", decode.smooth_window,
                         "Smooth features in-process before decoding (0: off)");
  decode_cmd->add_option("--fps", decode.fps, "Frame rate")->check(CLI::PositiveNumber);
  decode_cmd->add_flag("--names", decode.names, "Write phase names instead of indices");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy and per-class Jaccard");
  eval_cmd->add_option("--pred", eval.pred, "Predicted labels CSV")->required();
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth labels CSV")->required();
  eval_cmd->add_option("--margin-seconds", eval.margin_seconds, "Boundary tolerance")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  eval_cmd->add_option("--fps", eval.fps, "Frame rate")->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--dump-frames", eval.dump_frames, "Write per-frame CSV here");
  eval_cmd->add_flag("--json", eval.json, "Print the report as JSON");
  eval.phases.add_to(eval_cmd);

  UpsampleOptions up;
  auto* up_cmd = app.add_subcommand("upsample", "Replicate labels to the video frame rate");
  up_cmd->add_option("--in", up.in, "Input labels CSV")->required();
  up_cmd->add_option("--out", up.out, "Output labels CSV")->required();
  up_cmd->add_option("--factor", up.factor, "Copies per label")->check(CLI::PositiveNumber)
      ->capture_default_str();
  up_cmd->add_option("--target-frames", up.target_frames, "Exact output length")->required();
  up_cmd->add_option("--fps", up.fps, "Input frame rate")->check(CLI::PositiveNumber);
  up_cmd->add_flag("--names", up.names, "Write phase names instead of indices");
  up.phases.add_to(up_cmd);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic train/test dataset");
  gen.scenario.add_to(gen_cmd);
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare smoothing, online and offline decoding");
  bench.scenario.add_to(bench_cmd);
  bench_cmd->add_option("--seeds", bench.seeds, "Number of consecutive seeds")
      ->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*smooth_cmd) return cmd_smooth(smooth_opt);
    if (*decode_cmd) return cmd_decode(decode);
    if (*eval_cmd) return cmd_eval(eval);
    if (*up_cmd) return cmd_upsample(up);
    if (*gen_cmd) return cmd_gen(gen);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
