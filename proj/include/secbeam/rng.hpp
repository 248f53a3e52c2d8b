#pragma once

#include <cstdint>
#include <limits>

namespace secbeam {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random bit generator.  Output i of the stream keyed by
/// (seed, index) is a pure function of (seed, index, i), so per-trial streams
/// are independent of evaluation order and thread count.
class counter_stream {
public:
  using result_type = std::uint64_t;

  counter_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) noexcept
      : key_(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL) ^ (lane * 0x8cb92ba72f3d8dd7ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace secbeam
