#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace fsgnn {

/// Incremental FNV-1a, 64-bit.
class Fnv1a {
public:
  void update(std::span<const std::byte> bytes) noexcept {
    for (std::byte b : bytes) {
      state_ ^= static_cast<std::uint64_t>(b);
      state_ *= 0x100000001B3ull;
    }
  }
  template <typename T>
  void update_value(const T& v) noexcept {
    update(std::as_bytes(std::span<const T, 1>(&v, 1)));
  }
  std::uint64_t digest() const noexcept { return state_; }

private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;
};

} // namespace fsgnn
