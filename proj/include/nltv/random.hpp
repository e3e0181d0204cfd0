#pragma once

#include <cstdint>

namespace nltv {

/// Counter-based generator: the i-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, i), so streams can be consumed in any order.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace nltv
