#include "phasehmm/synthgen.hpp"

#include <cmath>
#include <random>

#include "json.hpp"
#include "phasehmm/error.hpp"

namespace phasehmm {

using nlohmann::json;

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (num_states < 1) fail("K must be >= 1");
  if (dim < 1) fail("D must be >= 1");
  if (length < 1) fail("T must be >= 1");
  if (n_train < 1) fail("n_train must be >= 1");
  if (n_test < 1) fail("n_test must be >= 1");
  if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) fail("noise_scale must be > 0");
  if (!(dwell >= 1.0) || !std::isfinite(dwell)) fail("dwell must be >= 1");
  if (!(fps > 0.0) || !std::isfinite(fps)) fail("fps must be > 0");
  if (window < 1) fail("window must be >= 1");
  if (!(margin_seconds >= 0.0)) fail("margin must be >= 0");
}

ScenarioConfig scenario_from_json(const std::string& text, ScenarioConfig cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Parse, "scenario config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "K") cfg.num_states = value.get<std::size_t>();
      else if (key == "D") cfg.dim = value.get<std::size_t>();
      else if (key == "T") cfg.length = value.get<std::size_t>();
      else if (key == "n_train") cfg.n_train = value.get<std::size_t>();
      else if (key == "n_test") cfg.n_test = value.get<std::size_t>();
      else if (key == "noise_scale") cfg.noise_scale = value.get<double>();
      else if (key == "dwell") cfg.dwell = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "fps") cfg.fps = value.get<double>();
      else if (key == "window") cfg.window = value.get<std::size_t>();
      else if (key == "margin_seconds") cfg.margin_seconds = value.get<double>();
      else throw Error(ErrorKind::Parse, "unknown scenario field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j = {{"K", cfg.num_states},     {"D", cfg.dim},
            {"T", cfg.length},         {"n_train", cfg.n_train},
            {"n_test", cfg.n_test},    {"noise_scale", cfg.noise_scale},
            {"dwell", cfg.dwell},      {"seed", cfg.seed},
            {"fps", cfg.fps},          {"window", cfg.window},
            {"margin_seconds", cfg.margin_seconds}};
  return j.dump(2);
}

HmmModel build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto k = static_cast<Eigen::Index>(cfg.num_states);
  const auto d = static_cast<Eigen::Index>(cfg.dim);

  Eigen::VectorXd initial = Eigen::VectorXd::Zero(k);
  initial[0] = 1.0;

  const double leave = 1.0 / cfg.dwell;
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i + 1 < k; ++i) {
    transition(i, i) = 1.0 - leave;
    transition(i, i + 1) = leave;
  }
  transition(k - 1, k - 1) = 1.0;

  std::vector<Eigen::VectorXd> means;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index s = 0; s < k; ++s) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    if (d >= k) {
      mu[s] = 1.0;
    } else {
      for (Eigen::Index i = 0; i < d; ++i) mu[i] = gauss(rng);
      const double norm = mu.norm();
      if (norm > 0.0) mu /= norm;
    }
    means.push_back(std::move(mu));
  }
  std::vector<Eigen::MatrixXd> covs(cfg.num_states,
                                    cfg.noise_scale * Eigen::MatrixXd::Identity(d, d));
  return HmmModel(std::move(initial), std::move(transition), std::move(means), std::move(covs));
}

SyntheticDataset generate(const ScenarioConfig& cfg) {
  SyntheticDataset ds{build_scenario(cfg), {}, {}};
  // Separate stream from the one build_scenario uses for the means.
  std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  for (std::size_t i = 0; i < cfg.n_train; ++i) {
    ds.train.push_back(sample(ds.truth, cfg.length, rng, cfg.fps));
  }
  for (std::size_t i = 0; i < cfg.n_test; ++i) {
    ds.test.push_back(sample(ds.truth, cfg.length, rng, cfg.fps));
  }
  return ds;
}

namespace {

struct MethodAccumulator {
  std::vector<double> accuracies;
  std::vector<double> class_sum;
  std::vector<std::size_t> class_count;

  explicit MethodAccumulator(std::size_t k) : class_sum(k, 0.0), class_count(k, 0) {}

  void add(const EvalReport& report) {
    accuracies.push_back(report.accuracy);
    for (std::size_t c = 0; c < class_sum.size(); ++c) {
      if (const auto& j = report.per_class_jaccard[c]) {
        class_sum[c] += *j;
        ++class_count[c];
      }
    }
  }

  MethodScore finish(std::string_view name) const {
    MethodScore score;
    score.name = std::string(name);
    std::vector<std::optional<double>> acc(accuracies.begin(), accuracies.end());
    const auto a = mean_std(acc);
    score.accuracy = a.mean;
    score.accuracy_std = a.std;
    score.per_class_jaccard.resize(class_sum.size());
    for (std::size_t c = 0; c < class_sum.size(); ++c) {
      if (class_count[c] > 0) {
        score.per_class_jaccard[c] = class_sum[c] / static_cast<double>(class_count[c]);
      }
    }
    const auto j = mean_std(score.per_class_jaccard);
    score.jaccard = j.mean;
    score.jaccard_std = j.std;
    return score;
  }
};

}  // namespace

bool ExperimentResult::accuracy_ordered() const {
  return methods[2].accuracy >= methods[1].accuracy && methods[1].accuracy >= methods[0].accuracy;
}

bool ExperimentResult::jaccard_ordered() const {
  return methods[2].jaccard >= methods[1].jaccard && methods[1].jaccard >= methods[0].jaccard;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.dim != cfg.num_states) {
    throw Error(ErrorKind::DimensionMismatch,
                "the smoothed-argmax baseline needs D == K (got D=" + std::to_string(cfg.dim) +
                    ", K=" + std::to_string(cfg.num_states) + ")");
  }
  const auto ds = generate(cfg);
  const SmoothingConfig smoothing{cfg.window};
  const std::size_t k = cfg.num_states;

  std::vector<ObservationSequence> train_obs;
  std::vector<LabelSequence> train_labels;
  for (const auto& s : ds.train) {
    train_obs.push_back(smooth(s.observations, smoothing));
    train_labels.push_back(s.labels);
  }
  const auto fitted = fit(train_obs, train_labels, k).model;

  std::array<MethodAccumulator, 3> acc{MethodAccumulator(k), MethodAccumulator(k),
                                       MethodAccumulator(k)};
  for (const auto& s : ds.test) {
    const auto smoothed = smooth(s.observations, smoothing);
    const auto& gt = s.labels;
    acc[0].add(summarize(argmax_labels(smoothed, k), gt, k, cfg.margin_seconds));
    acc[1].add(summarize(decode_online(fitted, smoothed), gt, k, cfg.margin_seconds));
    acc[2].add(summarize(viterbi_offline(fitted, smoothed).states, gt, k, cfg.margin_seconds));
  }

  ExperimentResult result{cfg, {}};
  for (std::size_t m = 0; m < 3; ++m) result.methods[m] = acc[m].finish(kMethodNames[m]);
  return result;
}

}  // namespace phasehmm
