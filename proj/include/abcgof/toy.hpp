#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "abcgof/simulator.hpp"

namespace abcgof {

enum class ToyFamily { gaussian, laplace };

// Location ~ U(-10, 10); variance ~ 1 / chi2(3). Laplace samples use scale
// b = sqrt(v / 2) so their variance is v.
struct ToyModelSpec {
  ToyFamily family = ToyFamily::gaussian;
  std::size_t sample_size = 50;
};

inline constexpr double kToyLocationBound = 10.0;
inline constexpr int kToyVarianceDof = 3;

// (location, variance).
std::array<double, 2> toy_draw_prior(const ToyModelSpec& spec, Rng& rng);

// Mean, unbiased variance, skewness m3 / m2^1.5 and kurtosis m4 / m2^2 (m_r
// central moments with denominator n).
std::array<double, 4> moment_stats(std::span<const double> sample);

// Draws sample_size values and summarizes them with moment_stats.
std::array<double, 4> toy_simulate(const ToyModelSpec& spec, double location,
                                   double variance, Rng& rng);

// The raw sample behind toy_simulate, for checks on the sampler itself.
std::vector<double> toy_sample(ToyFamily family, double location,
                               double variance, std::size_t size, Rng& rng);

class ToySimulator final : public Simulator {
 public:
  explicit ToySimulator(ToyModelSpec spec);

  std::string name() const override;
  const std::vector<std::string>& param_names() const override {
    return param_names_;
  }
  const std::vector<std::string>& stat_names() const override {
    return stat_names_;
  }
  std::vector<double> draw_prior(Rng& rng) const override;
  std::vector<double> simulate(std::span<const double> theta,
                               Rng& rng) const override;
  std::vector<ParamTransform> param_transforms() const override;

  const ToyModelSpec& spec() const { return spec_; }

 private:
  ToyModelSpec spec_;
  std::vector<std::string> param_names_{"location", "variance"};
  std::vector<std::string> stat_names_{"mean", "variance", "skewness",
                                       "kurtosis"};
};

}  // namespace abcgof
