#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace abcgof {

// Stream purposes. Every random quantity in the library is drawn from a
// stream keyed by (master seed, purpose, index), so results never depend on
// execution order or on how work is split across threads.
enum class StreamTag : std::uint64_t {
  table_row = 1,
  pseudo_observed = 2,
  null_replicate = 3,
  observed_replicate = 4,
  dataset = 5,
  dataset_test = 6,
  reference_table = 7,
};

// Mixes a master seed with a purpose tag and an index (splitmix64 finalizer
// applied in sequence).
std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                          std::uint64_t index = 0);

// Mersenne Twister engine with hand-written transforms. The std::
// distributions are implementation-defined, so none are used here: the
// sample path is fixed by the engine output alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, StreamTag tag,
                    std::uint64_t index = 0) {
    return Rng(derive_seed(master, tag, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1), never hitting either end.
  double uniform_open();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  double normal();
  double exponential();  // rate 1
  double chi_square(int degrees);
  std::uint64_t poisson(double mean);

  // Partial Fisher-Yates: `count` distinct values from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t count);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace abcgof
