#include "abcgof/rng.hpp"

#include <cmath>
#include <numeric>

#include "abcgof/error.hpp"

namespace abcgof {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return splitmix64(h ^ (index * kGolden));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw usage_error("uniform_index: empty range");
  // Lemire's multiply-shift with rejection of the biased low region.
  u128 m = static_cast<u128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_normal_ = true;
  return u * factor;
}

double Rng::exponential() { return -std::log(uniform_open()); }

double Rng::chi_square(int degrees) {
  if (degrees < 1) throw usage_error("chi_square: degrees must be >= 1");
  double total = 0.0;
  for (int i = 0; i < degrees; ++i) {
    const double z = normal();
    total += z * z;
  }
  return total;
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw usage_error("poisson: mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  // Sequential inversion; large means are split so exp(-mean) stays normal.
  if (mean > 200.0) {
    const double half = 0.5 * mean;
    return poisson(half) + poisson(mean - half);
  }
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;  // tail exhausted in double precision
    cdf = next;
  }
  return k;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n,
                                                         std::size_t count) {
  if (count > n) throw usage_error("sample_without_replacement: count > n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace abcgof
