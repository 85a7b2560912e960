#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phasehmm/hmm.hpp"
#include "phasehmm/metrics.hpp"
#include "phasehmm/smoothing.hpp"

namespace phasehmm {

/// Default noise variance; puts smoothed-argmax accuracy of the default
/// scenario in the 70-90 % band.
inline constexpr double kDefaultNoiseScale = 2.0;

struct ScenarioConfig {
  std::size_t num_states = 8;
  std::size_t dim = 8;
  std::size_t length = 2000;  // frames per sequence
  std::size_t n_train = 10;
  std::size_t n_test = 5;
  double noise_scale = kDefaultNoiseScale;
  double dwell = 200.0;  // expected frames per phase
  std::uint64_t seed = 0;
  double fps = 1.0;
  std::size_t window = kDefaultSmoothingWindow;
  double margin_seconds = kDefaultMarginSeconds;

  void validate() const;
};

ScenarioConfig scenario_from_json(const std::string& text, ScenarioConfig base = {});
std::string scenario_to_json(const ScenarioConfig& cfg);

/*!
 * Ground-truth left-to-right model: starts in state 0, stays with probability
 * 1 - 1/dwell, otherwise moves to the next state; the last state absorbs.
 * Means are the unit basis vectors when D >= K (seeded random unit vectors
 * otherwise) and every covariance is noise_scale * I.
 */
HmmModel build_scenario(const ScenarioConfig& cfg);

struct SyntheticDataset {
  HmmModel truth;
  std::vector<SampledSequence> train;
  std::vector<SampledSequence> test;
};

SyntheticDataset generate(const ScenarioConfig& cfg);

inline constexpr std::array<std::string_view, 3> kMethodNames = {"Avg Smoothing", "HMM Online",
                                                                 "HMM Offline"};

struct MethodScore {
  std::string name;
  double accuracy = 0.0;      // mean over test sequences
  double accuracy_std = 0.0;  // over test sequences
  double jaccard = 0.0;       // mean over classes of the per-class average
  double jaccard_std = 0.0;   // over classes
  std::vector<std::optional<double>> per_class_jaccard;
};

struct ExperimentResult {
  ScenarioConfig config;
  std::array<MethodScore, 3> methods;  // in kMethodNames order

  bool accuracy_ordered() const;  // offline >= online >= smoothing
  bool jaccard_ordered() const;
};

/// Samples train/test data from the scenario model, fits a fresh HMM on the
/// smoothed training sequences, and scores smoothed argmax, online decoding,
/// and offline decoding on the smoothed test sequences. Requires D == K.
ExperimentResult run_experiment(const ScenarioConfig& cfg);

}  // namespace phasehmm
