#pragma once

// Counter-based random streams. A draw is a pure function of
// (seed, domain, index, counter), so device i's stream does not depend on
// how many other devices exist or on the order in which they are advanced.

#include <cstdint>

namespace tclsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent purposes draw from disjoint key spaces.
enum class StreamDomain : std::uint64_t {
  Parameters = 1,
  InitialState = 2,
  Switching = 3,
  Dispatch = 4,
};

class CounterStream {
public:
  constexpr CounterStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) noexcept
      : key_(mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(domain))) + index))
  {
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept
  {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter);
  }

  /// Uniform on [0,1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept
  {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform on [low, high].
  constexpr double uniform(std::uint64_t counter, double low, double high) const noexcept
  {
    return low == high ? low : low + (high - low) * uniform(counter);
  }

private:
  std::uint64_t key_;
};

}  // namespace tclsim
