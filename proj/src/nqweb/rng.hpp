#pragma once

#include <cstdint>
#include <vector>

namespace nqweb {

/// splitmix64. Used instead of <random> engines so that sampled points are
/// bit-identical across standard libraries and across runs; report
/// determinism is part of the output contract.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [lo, hi) with 53-bit resolution.
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  /// Uniform in {0, ..., m-1}.
  std::uint64_t below(std::uint64_t m) { return next() % m; }
};

/// Derives an independent substream; mixing is order-free so per-triple
/// streams do not depend on evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 rng(seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL));
  rng.next();
  return rng.next();
}

/// Per-coordinate sampling ranges [lo, hi).
struct Box {
  std::vector<std::pair<double, double>> ranges;

  static Box cube(int n, double lo, double hi) {
    Box b;
    b.ranges.assign(static_cast<std::size_t>(n), {lo, hi});
    return b;
  }

  int dim() const { return static_cast<int>(ranges.size()); }
};

}  // namespace nqweb
