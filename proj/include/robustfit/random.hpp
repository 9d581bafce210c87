#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace robustfit {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of independent stream `stream` under `master`:
/// splitmix64(master + 0x9E3779B97F4A7C15 * (stream + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// mt19937_64 with distribution mappings written out here, since the standard
/// distributions are not specified bit-for-bit across library vendors. Each
/// call consumes a fixed number of engine draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// [0, 1), one draw.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Index in [0, n), one draw. Multiply-shift mapping; bias <= n / 2^64.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller, two draws.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace robustfit
