#pragma once

// Little-endian fixed-width serialization shared by the feature cache and
// parameter checkpoints. Every written byte also feeds a running FNV-1a so
// files carry a trailing checksum.

#include "fsgnn/hash.hpp"
#include "fsgnn/types.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace fsgnn::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class BinaryWriter {
public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void bytes(const void* data, std::size_t n) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    hash_.update({static_cast<const std::byte*>(data), n});
  }
  template <typename T>
  void value(T v) { bytes(&v, sizeof(T)); }
  void string(const std::string& s) {
    value<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void matrix(const MatrixXr& m) {
    value<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    value<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  void finish() {
    const std::uint64_t sum = hash_.digest();
    os_.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
    os_.flush();
    if (!os_) throw InputError("write failed");
  }

private:
  std::ostream& os_;
  Fnv1a hash_;
};

class BinaryReader {
public:
  BinaryReader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  void bytes(void* data, std::size_t n) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) fail("truncated");
    hash_.update({static_cast<const std::byte*>(data), n});
  }
  template <typename T>
  T value() {
    T v{};
    bytes(&v, sizeof(T));
    return v;
  }
  std::string string(std::size_t max_len = 4096) {
    const auto n = value<std::uint32_t>();
    if (n > max_len) fail("string length out of range");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  MatrixXr matrix(std::uint64_t max_elems = std::uint64_t(1) << 34) {
    const auto rows = value<std::uint64_t>();
    const auto cols = value<std::uint64_t>();
    if ((cols != 0 && rows > max_elems / cols)) fail("matrix shape out of range");
    MatrixXr m(static_cast<Index>(rows), static_cast<Index>(cols));
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }
  void finish() {
    const std::uint64_t expected = hash_.digest();
    std::uint64_t stored = 0;
    is_.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    if (is_.gcount() != sizeof(stored)) fail("missing checksum");
    if (stored != expected) fail("checksum mismatch");
    if (is_.peek() != std::char_traits<char>::eof()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError(what_ + ": " + why);
  }

private:
  std::istream& is_;
  std::string what_;
  Fnv1a hash_;
};

} // namespace fsgnn::detail
