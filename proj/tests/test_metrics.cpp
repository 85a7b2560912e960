#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "phasehmm/error.hpp"
#include "phasehmm/metrics.hpp"

using namespace phasehmm;

namespace {

LabelSequence labels(std::vector<PhaseIndex> l, double fps = 1.0) {
  return LabelSequence(std::move(l), fps);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("accuracy") {
  CHECK(accuracy(labels({0, 1, 2}), labels({0, 1, 2})) == 100.0);
  CHECK(accuracy(labels({0, 0, 1, 1}), labels({1, 1, 1, 1})) == 50.0);
  CHECK(accuracy(labels({0, 1, 1, 0}), labels({0, 1, 0, 0})) == 75.0);
  CHECK_THROWS_AS(accuracy(labels({0}), labels({0, 1})), Error);
  CHECK_THROWS_AS(accuracy(labels({}), labels({})), Error);
}

TEST_CASE("margin conversion") {
  CHECK(margin_frames(10.0, 1.0) == 10);
  CHECK(margin_frames(10.0, 25.0) == 250);
  CHECK(margin_frames(0.0, 25.0) == 0);
  CHECK_THROWS_AS(margin_frames(-1.0, 1.0), Error);
}

TEST_CASE("jaccard basics") {
  const auto same = jaccard_per_class(labels({0, 0, 2, 2}), labels({0, 0, 2, 2}), 3, 10.0);
  CHECK(same[0] == 100.0);
  CHECK_FALSE(same[1].has_value());
  CHECK(same[2] == 100.0);

  const auto disjoint = jaccard_per_class(labels({0, 0, 0}), labels({1, 1, 1}), 3, 0.0);
  CHECK(disjoint[0] == 0.0);
  CHECK(disjoint[1] == 0.0);
  CHECK_FALSE(disjoint[2].has_value());
}

TEST_CASE("lagged boundary example") {
  const auto gt = labels({0, 0, 0, 1, 1, 1});
  const auto pred = labels({0, 0, 1, 1, 1, 1});
  const auto m0 = jaccard_per_class(pred, gt, 2, 0.0);
  CHECK(*m0[0] == doctest::Approx(200.0 / 3.0));
  CHECK(*m0[1] == doctest::Approx(75.0));
  const auto m1 = jaccard_per_class(pred, gt, 2, 1.0);
  CHECK(*m1[0] == doctest::Approx(200.0 / 3.0));
  CHECK(*m1[1] == doctest::Approx(100.0));

  // Brute-force re-derivation of the same numbers.
  CHECK(oracle::set_jaccard(pred, gt, 2) == m0);
  CHECK(oracle::margin_jaccard(pred, gt, 2, 1) == m1);
}

TEST_CASE("margin scales with fps") {
  const auto gt = labels({0, 0, 0, 1, 1, 1}, 2.0);
  const auto pred = labels({0, 0, 1, 1, 1, 1}, 2.0);
  // 0.5 s at 2 fps is one frame.
  CHECK(jaccard_per_class(pred, gt, 2, 0.5)[1] == 100.0);
  CHECK(*jaccard_per_class(pred, gt, 2, 0.2)[1] == doctest::Approx(75.0));
}

TEST_CASE("margin jaccard matches direct scan, is monotone and bounded") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 5;
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 80);
    const auto gt = oracle::random_labels(rng, n, k);
    const auto pred = oracle::random_labels(rng, n, k);
    std::vector<std::optional<double>> prev;
    for (double margin : {0.0, 1.0, 2.0, 5.0, 10.0}) {
      const auto j = jaccard_per_class(pred, gt, k, margin);
      CHECK(j == oracle::margin_jaccard(pred, gt, k, static_cast<std::size_t>(margin)));
      for (std::size_t c = 0; c < k; ++c) {
        if (!j[c]) continue;
        CHECK(*j[c] >= 0.0);
        CHECK(*j[c] <= 100.0);
        if (!prev.empty()) CHECK(*j[c] >= *prev[c]);
      }
      prev = j;
    }
    CHECK(jaccard_per_class(pred, gt, k, 0.0) == jaccard_per_class(gt, pred, k, 0.0));
  }
}

TEST_CASE("consistent relabeling permutes per-class scores") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 4;
    const auto gt = oracle::random_labels(rng, 60, k);
    const auto pred = oracle::random_labels(rng, 60, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabel = [&](const LabelSequence& s) {
      std::vector<PhaseIndex> out;
      for (auto l : s.labels()) out.push_back(perm[l]);
      return labels(out);
    };
    const auto base = summarize(pred, gt, k, 3.0);
    const auto moved = summarize(relabel(pred), relabel(gt), k, 3.0);
    CHECK(base.accuracy == moved.accuracy);
    for (std::size_t c = 0; c < k; ++c) CHECK(base.per_class_jaccard[c] == moved.per_class_jaccard[perm[c]]);
  }
}

TEST_CASE("summarize") {
  const auto perfect = summarize(labels({0, 1, 1, 2}), labels({0, 1, 1, 2}), 8);
  CHECK(perfect.accuracy == 100.0);
  CHECK(perfect.jaccard_mean == 100.0);
  CHECK(perfect.jaccard_std == 0.0);
  CHECK(perfect.per_class_jaccard.size() == 8);
  CHECK(perfect.margin_seconds == 10.0);

  const auto agg = mean_std({60.0, std::nullopt, 100.0});
  CHECK(agg.mean == 80.0);
  CHECK(agg.std == 20.0);
}

TEST_CASE("dump_frames") {
  CHECK(dump_frames(labels({}), labels({})).empty());
  const auto ok = dump_frames(labels({1, 1}), labels({1, 1}));
  CHECK(ok.size() == 2);
  CHECK(ok[0].match);
  CHECK(ok[1].match);
  const auto r = dump_frames(labels({0, 1}), labels({0, 0}));
  CHECK(r[0] == FrameRecord{0, 0.0, 0, 0, true});
  CHECK(r[1] == FrameRecord{1, 1.0, 1, 0, false});
  CHECK(dump_frames(labels({0, 1}, 2.0), labels({0, 0}, 2.0))[1].time_s == 0.5);
  CHECK_THROWS_AS(dump_frames(labels({0}), labels({})), Error);
}

}  // TEST_SUITE
