#include "robustfit/random.hpp"

#include <cmath>
#include <numbers>

namespace robustfit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

__extension__ typedef unsigned __int128 u128;

std::size_t Rng::index(std::size_t n) {
  const u128 wide = static_cast<u128>(engine_()) * static_cast<u128>(n);
  return static_cast<std::size_t>(wide >> 64);
}

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace robustfit
