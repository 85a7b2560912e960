#include <doctest.h>

#include <bit>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "phasehmm/dataio.hpp"
#include "phasehmm/error.hpp"

using namespace phasehmm;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

ObservationSequence parse_csv(const std::string& text) {
  std::istringstream in(text);
  return read_logprobs(in, FeatureFormat::Csv);
}

LabelSequence parse_labels(const std::string& text, const PhaseSet& phases = PhaseSet::m2cai()) {
  std::istringstream in(text);
  return read_labels(in, phases);
}

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / ("phasehmm_dataio_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("dataio") {

TEST_CASE("feature CSV") {
  const auto obs = parse_csv("frame,c0,c1\n0,-0.1,-2.3\n1,-2.3,-0.1\n");
  CHECK(obs.size() == 2);
  CHECK(obs.dim() == 2);
  CHECK(obs.at(0, 1) == -2.3);
  CHECK(obs.at(1, 0) == -2.3);
  CHECK(obs.fps() == 1.0);

  const auto crlf = parse_csv("frame,c0,c1\r\n0,-0.1,-2.3\r\n1,-2.3,-0.1\r\n");
  CHECK(crlf == obs);

  const auto empty = parse_csv("frame,c0,c1,c2\n");
  CHECK(empty.size() == 0);
  CHECK(empty.dim() == 3);
}

TEST_CASE("feature CSV errors") {
  CHECK(kind_of([] { parse_csv("frame,c0,c1\n0,1,2\n1,1,2,3\n"); }) == ErrorKind::RaggedRows);
  CHECK(kind_of([] { parse_csv("frame,c0\n0,1\n2,1\n"); }) == ErrorKind::NonContiguousFrames);
  CHECK(kind_of([] { parse_csv("frame,c0\n1,1\n"); }) == ErrorKind::NonContiguousFrames);
  CHECK(kind_of([] { parse_csv("frame,c0\n0,abc\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_csv("frame,c0\n0,nan\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_csv("f,c0\n0,1\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_csv("frame,c1\n0,1\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_csv(""); }) == ErrorKind::Parse);
  CHECK(kind_of([] { read_logprobs(fs::path("/nonexistent/x.csv")); }) == ErrorKind::Io);
  try {
    parse_csv("frame,c0\n0,1\n1,oops\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("feature JSONL") {
  std::istringstream in("{\"frame\":0,\"scores\":[-0.1,-2.3]}\n{\"frame\":1,\"scores\":[-2.3,-0.1]}\n");
  const auto obs = read_logprobs(in, FeatureFormat::Jsonl);
  CHECK(obs == parse_csv("frame,c0,c1\n0,-0.1,-2.3\n1,-2.3,-0.1\n"));

  std::istringstream ragged("{\"frame\":0,\"scores\":[1,2]}\n{\"frame\":1,\"scores\":[1]}\n");
  CHECK(kind_of([&] { read_logprobs(ragged, FeatureFormat::Jsonl); }) == ErrorKind::RaggedRows);
  std::istringstream bad("{\"frame\":0}\n");
  CHECK(kind_of([&] { read_logprobs(bad, FeatureFormat::Jsonl); }) == ErrorKind::Parse);
  std::istringstream gap("{\"frame\":1,\"scores\":[1]}\n");
  CHECK(kind_of([&] { read_logprobs(gap, FeatureFormat::Jsonl); }) == ErrorKind::NonContiguousFrames);
  CHECK(detect_format("a.jsonl") == FeatureFormat::Jsonl);
  CHECK(detect_format("a.features.csv") == FeatureFormat::Csv);
}

TEST_CASE("feature reader is incremental") {
  std::istringstream in("frame,c0\n0,1\n1,2\n1,3\n");
  FeatureReader reader(in, FeatureFormat::Csv);
  CHECK(reader.dim() == 1u);
  CHECK(reader.next() == std::vector<double>{1.0});
  CHECK(reader.next() == std::vector<double>{2.0});
  // The defect on the third row only surfaces when that row is requested.
  CHECK_THROWS_AS(reader.next(), Error);
}

TEST_CASE("features write losslessly") {
  std::mt19937_64 rng(3);
  const auto obs = oracle::random_observations(rng, 25, 4, 7.0);
  std::stringstream buf;
  write_logprobs(buf, obs);
  CHECK(read_logprobs(buf, FeatureFormat::Csv) == obs);
}

TEST_CASE("labels") {
  CHECK(parse_labels("frame,phase\n0,2\n1,2\n2,3\n").labels() == std::vector<PhaseIndex>{2, 2, 3});
  CHECK(parse_labels("frame,phase\n0,CalotTriangleDissection\n").labels() == std::vector<PhaseIndex>{2});
  CHECK(parse_labels("frame,phase\n").empty());
  CHECK(kind_of([] { parse_labels("frame,phase\n0,Dancing\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_labels("frame,phase\n0,8\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_labels("frame,phase\n0,1\n0,1\n"); }) == ErrorKind::NonContiguousFrames);
  CHECK(kind_of([] { parse_labels("0,1\n"); }) == ErrorKind::Parse);
}

TEST_CASE("label writing") {
  const auto phases = PhaseSet::m2cai();
  std::stringstream a;
  write_labels(a, LabelSequence({2, 2}, 1.0), phases);
  CHECK(a.str() == "frame,phase\n0,2\n1,2\n");
  std::stringstream b;
  write_labels(b, LabelSequence(1.0), phases);
  CHECK(b.str() == "frame,phase\n");
  std::stringstream c;
  write_labels(c, LabelSequence({0, 7}, 1.0), phases, true);
  CHECK(c.str() == "frame,phase\n0,TrocarPlacement\n1,GallbladderRetraction\n");
  CHECK(parse_labels(c.str()).labels() == std::vector<PhaseIndex>{0, 7});
}

TEST_CASE("upsample") {
  const LabelSequence pred({0, 1}, 1.0);
  auto expect = [](std::size_t zeros, std::size_t ones) {
    std::vector<PhaseIndex> v(zeros, 0);
    v.insert(v.end(), ones, 1);
    return v;
  };
  CHECK(upsample(pred, 25, 50).labels() == expect(25, 25));
  CHECK(upsample(pred, 25, 47).labels() == expect(25, 22));
  CHECK(upsample(pred, 25, 55).labels() == expect(25, 30));
  CHECK(upsample(pred, 25, 10).labels() == expect(10, 0));
  CHECK(upsample(pred, 25, 50).fps() == 25.0);
  CHECK(upsample(pred, 1, 2) == pred);
  CHECK(upsample(LabelSequence(1.0), 25, 0).empty());
  CHECK(kind_of([] { upsample(LabelSequence(1.0), 25, 1); }) == ErrorKind::EmptyInputWithPositiveTarget);
  CHECK(kind_of([&] { upsample(pred, 0, 1); }) == ErrorKind::InvalidArgument);
  CHECK(kDefaultUpsampleFactor == 25);
}

TEST_CASE("model JSON round trip is bit exact") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = oracle::random_model(rng, 3, 2, {trial % 2 == 0});
    const ModelFile file{PhaseSet::numbered(3), model};
    const auto back = model_from_json(model_to_json(file));
    CHECK(back.phases == file.phases);
    CHECK(back.model.initial() == model.initial());
    CHECK(back.model.transition() == model.transition());
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(back.model.means()[k] == model.means()[k]);
      CHECK(back.model.covariances()[k] == model.covariances()[k]);
    }
  }
}

TEST_CASE("model loading rejects invalid files") {
  std::mt19937_64 rng(45);
  const ModelFile file{PhaseSet::numbered(2), oracle::random_model(rng, 2, 1)};
  auto j = model_to_json(file);

  auto replace = [](std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
  };
  const std::string bad_version = replace(j, "\"schema_version\": 1", "\"schema_version\": 7");
  try {
    model_from_json(bad_version);
    FAIL("expected Parse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }

  // A transition row summing to 0.9.
  const std::string text =
      R"({"schema_version":1,"phases":["a","b"],"K":2,"D":1,"initial":[1,0],)"
      R"("transition":[[0.5,0.4],[0,1]],"means":[[0],[1]],"covariances":[[[1]],[[1]]]})";
  CHECK(kind_of([&] { model_from_json(text); }) == ErrorKind::InvariantViolation);
  const std::string not_pd =
      R"({"schema_version":1,"phases":["a","b"],"K":2,"D":1,"initial":[1,0],)"
      R"("transition":[[0.5,0.5],[0,1]],"means":[[0],[1]],"covariances":[[[1]],[[-1]]]})";
  CHECK(kind_of([&] { model_from_json(not_pd); }) == ErrorKind::InvariantViolation);
  CHECK(kind_of([] { model_from_json("{not json"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { model_from_json(R"({"schema_version":1})"); }) == ErrorKind::Parse);
  const std::string wrong_shape =
      R"({"schema_version":1,"phases":["a","b"],"K":2,"D":1,"initial":[1,0,0],)"
      R"("transition":[[0.5,0.5],[0,1]],"means":[[0],[1]],"covariances":[[[1]],[[1]]]})";
  CHECK(kind_of([&] { model_from_json(wrong_shape); }) == ErrorKind::Parse);
}

TEST_CASE("model save and load through files") {
  std::mt19937_64 rng(46);
  const auto dir = temp_dir();
  const ModelFile file{PhaseSet::m2cai(), oracle::random_model(rng, 8, 8, {true})};
  save_model(file, dir / "m.json");
  const auto back = load_model(dir / "m.json");
  CHECK(back.model.transition() == file.model.transition());
  CHECK(kind_of([&] { load_model(dir / "missing.json"); }) == ErrorKind::Io);
  CHECK(kind_of([&] { save_model(file, dir / "no" / "such" / "dir.json"); }) == ErrorKind::Io);
  fs::remove_all(dir);
}

TEST_CASE("frame dump CSV") {
  std::stringstream out;
  write_frame_dump(out, dump_frames(LabelSequence({0, 1}, 1.0), LabelSequence({0, 0}, 1.0)));
  CHECK(out.str() == "frame,time_s,pred,gt,match\n0,0,0,0,true\n1,1,1,0,false\n");
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    const double v = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(v)) continue;
    std::istringstream in("frame,c0\n0," + format_double(v) + "\n");
    CHECK(read_logprobs(in, FeatureFormat::Csv).at(0, 0) == v);
  }
}

}  // TEST_SUITE
