#include "abcgof/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcgof/error.hpp"
#include "abcgof/parallel.hpp"

namespace abcgof {

double ParamTransform::forward(double x) const {
  switch (kind) {
    case Kind::none:
      return x;
    case Kind::log:
      if (!(x > 0.0)) {
        throw data_error("log transform of nonpositive value " +
                         format_double(x));
      }
      return std::log(x);
    case Kind::logit: {
      // Values on the prior boundary are nudged inside so the logit stays
      // finite.
      const double width = upper - lower;
      const double eps = width * 1e-12;
      const double clamped = std::clamp(x, lower + eps, upper - eps);
      return std::log((clamped - lower) / (upper - clamped));
    }
  }
  return x;
}

double ParamTransform::inverse(double y) const {
  switch (kind) {
    case Kind::none:
      return y;
    case Kind::log:
      return std::exp(y);
    case Kind::logit: {
      const double e = std::exp(-std::abs(y));
      const double sig = y >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      return lower + (upper - lower) * sig;
    }
  }
  return y;
}

ReferenceTable simulate_reference_table(const Simulator& simulator,
                                        std::size_t n, std::uint64_t seed,
                                        int threads) {
  const auto p = static_cast<Eigen::Index>(simulator.param_names().size());
  const auto k = static_cast<Eigen::Index>(simulator.stat_names().size());
  Matrix params(static_cast<Eigen::Index>(n), p);
  Matrix stats(static_cast<Eigen::Index>(n), k);
  parallel_for(n, threads, [&](std::size_t i) {
    auto rng = Rng::stream(seed, StreamTag::table_row, i);
    const auto theta = simulator.draw_prior(rng);
    const auto s = simulator.simulate(theta, rng);
    if (static_cast<Eigen::Index>(theta.size()) != p ||
        static_cast<Eigen::Index>(s.size()) != k) {
      throw SimulationError(simulator.name() + ": output size mismatch", theta);
    }
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < p; ++j) params(row, j) = theta[j];
    for (Eigen::Index j = 0; j < k; ++j) stats(row, j) = s[j];
  });
  return ReferenceTable(simulator.param_names(), simulator.stat_names(),
                        std::move(params), std::move(stats));
}

}  // namespace abcgof
