#include "fsgnn/hop_features.hpp"

#include "binary_io.hpp"

#include <array>
#include <fstream>
#include <system_error>

namespace fsgnn {

namespace {
constexpr std::array<char, 8> kCacheMagic = {'F', 'S', 'G', 'N', 'N', 'H', 'O', 'P'};
constexpr std::uint32_t kCacheVersion = 1;

struct CacheHeader {
  CacheKey key;
  std::uint64_t rows = 0;
  std::uint32_t count = 0;
};

CacheHeader read_header(detail::BinaryReader& in) {
  std::array<char, 8> magic{};
  in.bytes(magic.data(), magic.size());
  if (magic != kCacheMagic) in.fail("not a hop feature cache");
  if (in.value<std::uint32_t>() != kCacheVersion) in.fail("unsupported cache version");
  CacheHeader h;
  h.key.dataset_hash = in.value<std::uint64_t>();
  h.key.hops = static_cast<int>(in.value<std::uint32_t>());
  const auto mode = in.value<std::uint32_t>();
  if (mode > 2) in.fail("bad mode");
  h.key.mode = static_cast<HopMode>(mode);
  h.rows = in.value<std::uint64_t>();
  h.count = in.value<std::uint32_t>();
  return h;
}
} // namespace

std::string to_string(HopMode mode) {
  switch (mode) {
  case HopMode::both: return "both";
  case HopMode::self_loop_only: return "self_loop_only";
  case HopMode::no_loop_only: return "no_loop_only";
  }
  return "?";
}

HopMode hop_mode_from_string(const std::string& s) {
  if (s == "both") return HopMode::both;
  if (s == "self_loop_only") return HopMode::self_loop_only;
  if (s == "no_loop_only") return HopMode::no_loop_only;
  throw InputError("unknown hop mode '" + s + "'");
}

std::string HopTag::name() const {
  if (hop == 0) return "X";
  const std::string power = hop == 1 ? "" : "^" + std::to_string(hop);
  return loop == LoopMode::none ? "A" + power + "X" : "(A+I)" + power + "X";
}

FeatureMask::FeatureMask(std::vector<bool> bits) : bits_(std::move(bits)) {}

FeatureMask FeatureMask::all(std::size_t length) { return FeatureMask(std::vector<bool>(length, true)); }

FeatureMask FeatureMask::single(std::size_t length, std::size_t index) {
  std::vector<bool> bits(length, false);
  bits.at(index) = true;
  return FeatureMask(std::move(bits));
}

FeatureMask FeatureMask::from_bits(std::uint64_t bits, std::size_t length) {
  require_shape(length <= 64, "mask longer than 64 bits");
  std::vector<bool> b(length);
  for (std::size_t i = 0; i < length; ++i) b[i] = (bits >> i) & 1u;
  return FeatureMask(std::move(b));
}

std::size_t FeatureMask::count() const noexcept {
  std::size_t c = 0;
  for (bool b : bits_) c += b;
  return c;
}

std::string FeatureMask::to_string() const {
  std::string s;
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<FeatureMask> enumerate_sub_masks(std::size_t length) {
  require_shape(length >= 1 && length <= 24, "sub-mask enumeration supports 1..24 features");
  std::vector<FeatureMask> out;
  const std::uint64_t full = (std::uint64_t(1) << length) - 1;
  for (std::uint64_t bits = 1; bits < full; ++bits) {
    if ((bits & (bits - 1)) == 0) continue; // singleton
    out.push_back(FeatureMask::from_bits(bits, length));
  }
  return out;
}

void cache_store(const HopFeatures& fs, const CacheKey& key, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write cache file " + tmp);
    detail::BinaryWriter out(os);
    out.bytes(kCacheMagic.data(), kCacheMagic.size());
    out.value<std::uint32_t>(kCacheVersion);
    out.value<std::uint64_t>(key.dataset_hash);
    out.value<std::uint32_t>(static_cast<std::uint32_t>(key.hops));
    out.value<std::uint32_t>(static_cast<std::uint32_t>(key.mode));
    out.value<std::uint64_t>(static_cast<std::uint64_t>(fs.rows()));
    out.value<std::uint32_t>(static_cast<std::uint32_t>(fs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      out.value<std::int32_t>(fs.tag(i).hop);
      out.value<std::uint32_t>(fs.tag(i).loop == LoopMode::self_loop ? 1u : 0u);
      out.matrix(fs[i]);
    }
    out.finish();
  }
  std::filesystem::rename(tmp, path);
}

HopFeatures cache_load(const std::filesystem::path& path, const CacheKey& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open cache file " + path.string());
  detail::BinaryReader in(is, "cache " + path.string());
  const CacheHeader h = read_header(in);
  if (h.key.dataset_hash != expected.dataset_hash) in.fail("dataset hash mismatch (stale cache)");
  if (h.key.hops != expected.hops || h.key.mode != expected.mode) in.fail("hop/mode mismatch");
  HopFeatures fs;
  for (std::uint32_t i = 0; i < h.count; ++i) {
    HopTag tag;
    tag.hop = in.value<std::int32_t>();
    const auto loop = in.value<std::uint32_t>();
    if (loop > 1) in.fail("bad loop tag");
    tag.loop = loop == 1 ? LoopMode::self_loop : LoopMode::none;
    MatrixXr m = in.matrix();
    if (static_cast<std::uint64_t>(m.rows()) != h.rows) in.fail("row count mismatch");
    if (!m.allFinite()) in.fail("non-finite values");
    fs.push_back(tag, std::move(m));
  }
  in.finish();
  return fs;
}

bool cache_matches(const std::filesystem::path& path, const CacheKey& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  try {
    detail::BinaryReader in(is, "cache");
    return read_header(in).key == expected;
  } catch (const InputError&) {
    return false;
  }
}

} // namespace fsgnn
