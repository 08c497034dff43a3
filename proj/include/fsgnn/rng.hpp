#pragma once

#include <cstdint>
#include <utility>

namespace fsgnn {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Mixes two words into a seed for an independent sub-stream.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ull + 0x632BE59BD9B4E019ull));
}

/// Counter-based generator: draw k of a stream depends only on (seed, k).
class RngStream {
public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t counter = 0) noexcept
      : seed_(seed), key_(splitmix64(seed)), counter_(counter) {}

  /// Draw `k` of the stream, independent of the current position.
  std::uint64_t at(std::uint64_t k) const noexcept { return splitmix64(key_ + k * kWeyl); }

  std::uint64_t next_u64() noexcept { return at(counter_++); }

  /// Advances the position by `n` draws.
  void discard(std::uint64_t n) noexcept { counter_ += n; }

  /// Maps a raw draw to [0, 1) with 53 random bits.
  static double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return to_unit(next_u64()); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ using u128 = unsigned __int128;
    const u128 wide = static_cast<u128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

private:
  static constexpr std::uint64_t kWeyl = 0xD1342543DE82EF95ull;

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

template <typename It>
void shuffle(It first, It last, RngStream& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.below(i);
    std::swap(first[i - 1], first[j]);
  }
}

} // namespace fsgnn
