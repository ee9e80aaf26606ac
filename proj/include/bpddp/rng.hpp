// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>

namespace bpddp {

/// Seeded pseudo-random stream. A stream is single-owner: one chain (or one
/// Monte Carlo loop) draws from it sequentially. Independent work gets
/// independent streams via spawn(), never a shared one.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw strictly inside (0,1).
  double uniform() {
    // 53-bit mantissa shifted by half a step keeps both endpoints excluded.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Derived stream that is statistically independent of this one.
  /// Deterministic in (seed, id), so multi-chain runs are reproducible.
  RandomStream spawn(std::uint64_t id) const {
    std::uint64_t z = seed_mix_ + 0x9e3779b97f4a7c15ULL * (id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return RandomStream(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_mix_ = init_mix();

  std::uint64_t init_mix() {
    // Capture entropy for spawn() without disturbing the main sequence:
    // copy the engine, not the live one.
    std::mt19937_64 copy = engine_;
    return copy();
  }
};

}  // namespace bpddp
