#include "abcgof/toy.hpp"

#include <cmath>

#include "abcgof/error.hpp"

namespace abcgof {

std::array<double, 2> toy_draw_prior(const ToyModelSpec&, Rng& rng) {
  const double location = rng.uniform(-kToyLocationBound, kToyLocationBound);
  const double variance = 1.0 / rng.chi_square(kToyVarianceDof);
  return {location, variance};
}

std::array<double, 4> moment_stats(std::span<const double> sample) {
  const auto n = static_cast<double>(sample.size());
  if (sample.size() < 2) throw usage_error("moment_stats: need 2+ values");
  double mean = 0.0;
  for (double x : sample) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : sample) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double ss = m2;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw data_error("moment_stats: sample has zero variance");
  return {mean, ss / (n - 1.0), m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

std::vector<double> toy_sample(ToyFamily family, double location,
                               double variance, std::size_t size, Rng& rng) {
  if (!(variance > 0.0) || !std::isfinite(variance) ||
      !std::isfinite(location)) {
    throw SimulationError("toy model: variance must be positive and finite",
                          {location, variance});
  }
  std::vector<double> sample(size);
  if (family == ToyFamily::gaussian) {
    const double sd = std::sqrt(variance);
    for (auto& x : sample) x = location + sd * rng.normal();
  } else {
    // Inverse CDF: a sign-symmetric exponential with scale b.
    const double b = std::sqrt(variance / 2.0);
    for (auto& x : sample) {
      const double u = rng.uniform_open() - 0.5;
      const double mag = -std::log1p(-2.0 * std::abs(u));
      x = location + (u < 0 ? -b * mag : b * mag);
    }
  }
  return sample;
}

std::array<double, 4> toy_simulate(const ToyModelSpec& spec, double location,
                                   double variance, Rng& rng) {
  const auto sample =
      toy_sample(spec.family, location, variance, spec.sample_size, rng);
  return moment_stats(sample);
}

ToySimulator::ToySimulator(ToyModelSpec spec) : spec_(spec) {
  if (spec_.sample_size < 4) {
    throw usage_error("toy model: sample size must be >= 4");
  }
}

std::string ToySimulator::name() const {
  return spec_.family == ToyFamily::gaussian ? "toy-gaussian" : "toy-laplace";
}

std::vector<double> ToySimulator::draw_prior(Rng& rng) const {
  const auto theta = toy_draw_prior(spec_, rng);
  return {theta[0], theta[1]};
}

std::vector<double> ToySimulator::simulate(std::span<const double> theta,
                                           Rng& rng) const {
  if (theta.size() != 2) {
    throw SimulationError("toy model: expected (location, variance)",
                          {theta.begin(), theta.end()});
  }
  const auto s = toy_simulate(spec_, theta[0], theta[1], rng);
  return {s.begin(), s.end()};
}

std::vector<ParamTransform> ToySimulator::param_transforms() const {
  return {ParamTransform::identity(), ParamTransform::positive()};
}

}  // namespace abcgof
