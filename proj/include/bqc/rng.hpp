#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace bqc {

/// SplitMix64 generator. Chosen over std engines for a stated, portable
/// mixing function: per-trial streams are derived as
///   stream(master, i) = SplitMix64 seeded with mix64(master ^ mix64(i + 1))
/// so alternate-language ports can reproduce the trial partitioning.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return (next() >> 11) * 0x1.0p-53; }

  int next_bit() { return static_cast<int>(next() >> 63); }

  /// Uniform in {0..7}.
  int next_angle_index() { return static_cast<int>(next() >> 61); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent per-trial stream from a master seed and a trial index.
inline SplitMix64 derive_stream(std::uint64_t master_seed,
                                std::uint64_t index) {
  return SplitMix64(mix64(master_seed ^ mix64(index + 1)));
}

/// Externalized branch selection for measurements: yields reals in [0,1).
using BranchSelect = std::function<double()>;

inline BranchSelect branch_source(SplitMix64& rng) {
  return [&rng]() { return rng.next_unit(); };
}

/// Inverse-CDF Poisson sample; no truncation cap.
inline int poisson_sample(double mean, SplitMix64& rng) {
  const double u = rng.next_unit();
  double pmf = std::exp(-mean);
  double cdf = pmf;
  int k = 0;
  while (cdf <= u) {
    ++k;
    pmf *= mean / k;
    cdf += pmf;
    if (pmf == 0.0) break;  // u in the far tail beyond double resolution
  }
  return k;
}

}  // namespace bqc
