#include "phasehmm/error.hpp"
#include "phasehmm/hmm.hpp"

namespace phasehmm {

namespace {

PhaseIndex draw_categorical(const Eigen::Ref<const Eigen::VectorXd>& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cum = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = i;
    cum += p[i];
    if (u < cum) return static_cast<PhaseIndex>(i);
  }
  // Rounding left cum slightly below 1.
  return static_cast<PhaseIndex>(last_positive);
}

}  // namespace

SampledSequence sample(const HmmModel& model, std::size_t length, std::mt19937_64& rng,
                       double fps) {
  if (length < 1) throw Error(ErrorKind::InvalidArgument, "sample length must be >= 1");
  const auto d = static_cast<Eigen::Index>(model.dim());
  std::normal_distribution<double> gauss(0.0, 1.0);

  SampledSequence out{LabelSequence(fps), ObservationSequence(model.dim(), fps)};
  Eigen::VectorXd z(d);
  Eigen::VectorXd y(d);
  PhaseIndex state = draw_categorical(model.initial(), rng);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) {
      const Eigen::VectorXd row = model.transition().row(static_cast<Eigen::Index>(state));
      state = draw_categorical(row, rng);
    }
    for (Eigen::Index i = 0; i < d; ++i) z[i] = gauss(rng);
    y = model.means()[state] + model.cholesky(state).triangularView<Eigen::Lower>() * z;
    out.labels.push_back(state);
    out.observations.push_back(std::span<const double>(y.data(), model.dim()));
  }
  return out;
}

SampledSequence sample(const HmmModel& model, std::size_t length, std::uint64_t seed,
                       double fps) {
  std::mt19937_64 rng(seed);
  return sample(model, length, rng, fps);
}

}  // namespace phasehmm
