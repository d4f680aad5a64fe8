#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "abcgof/core.hpp"
#include "abcgof/rng.hpp"

namespace abcgof {

// Scale on which a parameter is regression-adjusted. Positive parameters use
// log; parameters with a bounded prior use a logit on (lower, upper), which
// keeps adjusted draws inside the prior support.
struct ParamTransform {
  enum class Kind { none, log, logit };
  Kind kind = Kind::none;
  double lower = 0.0;
  double upper = 1.0;

  static ParamTransform identity() { return {}; }
  static ParamTransform positive() { return {Kind::log, 0.0, 0.0}; }
  static ParamTransform bounded(double lo, double hi) {
    return {Kind::logit, lo, hi};
  }

  double forward(double x) const;
  double inverse(double y) const;
};

// The generating mechanism p(s | theta) together with its prior p(theta).
// Implementations must be safe to call concurrently from several threads,
// each with its own Rng.
class Simulator {
 public:
  virtual ~Simulator() = default;

  virtual std::string name() const = 0;
  virtual const std::vector<std::string>& param_names() const = 0;
  virtual const std::vector<std::string>& stat_names() const = 0;
  virtual std::vector<double> draw_prior(Rng& rng) const = 0;
  // Throws SimulationError for parameter vectors outside the model's domain.
  virtual std::vector<double> simulate(std::span<const double> theta,
                                       Rng& rng) const = 0;

  virtual std::vector<ParamTransform> param_transforms() const {
    return std::vector<ParamTransform>(param_names().size());
  }
};

// Draws n rows of (theta, s) from the prior predictive distribution. Row i
// uses stream (seed, table_row, i), so the table is identical for any
// thread count.
ReferenceTable simulate_reference_table(const Simulator& simulator,
                                        std::size_t n, std::uint64_t seed,
                                        int threads = 1);

}  // namespace abcgof
