#pragma once

#include "fsgnn/sparse.hpp"
#include "fsgnn/types.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace fsgnn {

enum class HopMode { both, self_loop_only, no_loop_only };

std::string to_string(HopMode mode);
HopMode hop_mode_from_string(const std::string& s);

/// Provenance of one hop matrix. Hop 0 is the raw feature matrix and always
/// carries LoopMode::none.
struct HopTag {
  int hop = 0;
  LoopMode loop = LoopMode::none;

  /// "X", "A^2X", "(A+I)^3X", ...
  std::string name() const;
  bool operator==(const HopTag&) const = default;
};

/// Ordered multi-hop features, canonical order X, AX, ÃX, A²X, Ã²X, ...
/// Matrices are immutable and shared, so subsets are cheap.
template <typename Scalar>
class HopFeatureSet {
public:
  using MatrixPtr = std::shared_ptr<const Matrix<Scalar>>;

  void push_back(HopTag tag, MatrixPtr m) {
    require_shape(m != nullptr, "hop features: null matrix");
    require_shape(items_.empty() || m->rows() == rows(), "hop features: row count mismatch");
    require_finite(*m, "hop features");
    tags_.push_back(tag);
    items_.push_back(std::move(m));
  }
  void push_back(HopTag tag, Matrix<Scalar> m) {
    push_back(tag, std::make_shared<const Matrix<Scalar>>(std::move(m)));
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  Index rows() const noexcept { return items_.empty() ? 0 : items_.front()->rows(); }
  const HopTag& tag(std::size_t i) const { return tags_.at(i); }
  const std::vector<HopTag>& tags() const noexcept { return tags_; }
  const Matrix<Scalar>& operator[](std::size_t i) const { return *items_.at(i); }
  const MatrixPtr& shared(std::size_t i) const { return items_.at(i); }

private:
  std::vector<HopTag> tags_;
  std::vector<MatrixPtr> items_;
};

using HopFeatures = HopFeatureSet<double>;

/// Bitmask over the canonical ordering of a HopFeatureSet.
class FeatureMask {
public:
  FeatureMask() = default;
  explicit FeatureMask(std::vector<bool> bits);

  static FeatureMask all(std::size_t length);
  static FeatureMask single(std::size_t length, std::size_t index);
  /// Bit i of `bits` selects item i; length <= 64.
  static FeatureMask from_bits(std::uint64_t bits, std::size_t length);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t count() const noexcept;
  bool operator[](std::size_t i) const { return bits_.at(i); }
  /// Item 0 first, e.g. "1010000".
  std::string to_string() const;
  bool operator==(const FeatureMask&) const = default;

private:
  std::vector<bool> bits_;
};

/// Every mask that is neither a singleton nor the full set, in increasing
/// bit-pattern order (2^L - 1 - L - 1 masks; 119 for L = 7).
std::vector<FeatureMask> enumerate_sub_masks(std::size_t length);

/// Divides each row by its L1 norm; all-zero rows stay zero.
template <typename Scalar>
Matrix<Scalar> row_normalize(const Matrix<Scalar>& x) {
  Matrix<Scalar> out = x;
  for (Index r = 0; r < out.rows(); ++r) {
    const Scalar s = out.row(r).cwiseAbs().sum();
    if (s > Scalar(0)) out.row(r) /= s;
  }
  return out;
}

/// Precomputes hop features: chain j applies the no-loop (or self-loop)
/// operator to chain j-1, seeded from `x`. `both` yields 2k+1 matrices, the
/// single-loop modes k+1.
template <typename Scalar>
HopFeatureSet<Scalar> generate(const Matrix<Scalar>& x, const CsrMatrix<Scalar>& a_sym,
                               const CsrMatrix<Scalar>& a_tilde_sym, int k, HopMode mode) {
  require_shape(k >= 1, "generate: hop count must be >= 1");
  require_shape(a_sym.rows == x.rows() && a_sym.cols == x.rows(), "generate: A_sym shape");
  require_shape(a_tilde_sym.rows == x.rows() && a_tilde_sym.cols == x.rows(),
                "generate: Ã_sym shape");
  const bool no_loop = mode != HopMode::self_loop_only;
  const bool self_loop = mode != HopMode::no_loop_only;

  HopFeatureSet<Scalar> fs;
  auto seed = std::make_shared<const Matrix<Scalar>>(x);
  fs.push_back({0, LoopMode::none}, seed);
  auto prev_none = seed;
  auto prev_self = seed;
  for (int j = 1; j <= k; ++j) {
    if (no_loop) {
      prev_none = std::make_shared<const Matrix<Scalar>>(spmm(a_sym, *prev_none));
      fs.push_back({j, LoopMode::none}, prev_none);
    }
    if (self_loop) {
      prev_self = std::make_shared<const Matrix<Scalar>>(spmm(a_tilde_sym, *prev_self));
      fs.push_back({j, LoopMode::self_loop}, prev_self);
    }
  }
  return fs;
}

/// Retains masked items, preserving order.
template <typename Scalar>
HopFeatureSet<Scalar> select(const HopFeatureSet<Scalar>& fs, const FeatureMask& mask) {
  require_shape(mask.size() == fs.size(), "select: mask length " + std::to_string(mask.size()) +
                                              " != feature count " + std::to_string(fs.size()));
  if (mask.count() == 0) throw InputError("select: empty feature mask");
  HopFeatureSet<Scalar> out;
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (mask[i]) out.push_back(fs.tag(i), fs.shared(i));
  return out;
}

/// Identifies what a cache file was computed from.
struct CacheKey {
  std::uint64_t dataset_hash = 0;
  int hops = 0;
  HopMode mode = HopMode::both;
  bool operator==(const CacheKey&) const = default;
};

/// Binary cache, layout documented in docs/formats.md.
void cache_store(const HopFeatures& fs, const CacheKey& key, const std::filesystem::path& path);
/// Throws InputError on corruption or when the stored key differs from `expected`.
HopFeatures cache_load(const std::filesystem::path& path, const CacheKey& expected);
/// Reads only the header; nullopt-like false when the file is missing or unreadable.
bool cache_matches(const std::filesystem::path& path, const CacheKey& expected);

} // namespace fsgnn
