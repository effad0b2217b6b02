#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nm {

/// SplitMix64 (Steele, Lea, Flood 2014). The output stream for a given seed
/// is fixed by integer arithmetic alone and is identical on every platform.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;

  /// Uniform double in [0, 1): top 53 bits of next() scaled by 2^-53.
  double uniform() noexcept;

  /// Uniform integer in [0, bound) by rejection: draws r until
  /// r >= (2^64 - bound) % bound, then returns r % bound. bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates: for i = n-1 down to 1, swap(v[i], v[bounded(i+1)]).
template <typename T>
void shuffle(std::vector<T>& values, SplitMix64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace nm
