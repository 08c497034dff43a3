#pragma once

#include "fsgnn/hop_features.hpp"
#include "fsgnn/layers.hpp"
#include "fsgnn/rng.hpp"
#include "fsgnn/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fsgnn {

/// Architecture switches covering the proposed model and its ablations.
struct ModelVariant {
  bool soft_selection = true;
  bool shared_w0 = false;
  bool l2_norm = true;
  bool hidden_relu = true;
  nn::Aggregation aggregation = nn::Aggregation::concat;

  bool operator==(const ModelVariant&) const = default;
};

std::string to_string(nn::Aggregation a);
nn::Aggregation aggregation_from_string(const std::string& s);

/// Optimizer parameter groups: first-layer weights, second-layer weights, and
/// the soft-selection logits.
enum class ParamGroup { fc1, fc2, sca };

struct ModelParams {
  ModelVariant variant;
  Index hidden = 0;
  Index classes = 0;
  std::vector<MatrixXr> w0; ///< per branch d_l x h (one entry when shared_w0)
  std::vector<MatrixXr> b0; ///< 1 x h each
  MatrixXr gamma;           ///< L x 1 soft-selection logits
  MatrixXr w1;              ///< (L*h or h) x C
  MatrixXr b1;              ///< 1 x C

  std::size_t num_branches() const noexcept { return static_cast<std::size_t>(gamma.rows()); }

  /// Visits every tensor in a fixed order as f(name, group, tensor).
  template <typename F>
  void for_each_tensor(F&& f) {
    for (std::size_t i = 0; i < w0.size(); ++i) f("w0_" + std::to_string(i), ParamGroup::fc1, w0[i]);
    for (std::size_t i = 0; i < b0.size(); ++i) f("b0_" + std::to_string(i), ParamGroup::fc1, b0[i]);
    f("gamma", ParamGroup::sca, gamma);
    f("w1", ParamGroup::fc2, w1);
    f("b1", ParamGroup::fc2, b1);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<ModelParams*>(this)->for_each_tensor(
        [&](const std::string& n, ParamGroup g, const MatrixXr& t) { f(n, g, t); });
  }

  /// Same layout, all zeros.
  ModelParams zeros_like() const;
  bool operator==(const ModelParams&) const;
};

/// Weights uniform in +-1/sqrt(fan_in) from RngStream(seed), biases zero,
/// gamma all ones.
ModelParams init_params(const HopFeatures& fs, Index hidden, Index classes,
                        const ModelVariant& variant, std::uint64_t seed);

/// softmax(gamma).
VectorXr get_alphas(const ModelParams& p);

/// The per-branch multiplier actually applied: alphas, or ones when
/// soft-selection is off.
VectorXr branch_scales(const ModelParams& p);

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
};

/// Logits for `rows` (all rows when empty), in the order given. Dropout draws
/// come from `rng` only when training.
MatrixXr forward(const ModelParams& p, const HopFeatures& fs, const ForwardOptions& opts,
                 RngStream& rng, std::span<const Index> rows = {});

struct LossAndGrads {
  double loss = 0;
  ModelParams grads;
};

/// Mean cross-entropy over `train_idx` and the gradient of every tensor.
/// Only train rows are propagated, so labels of other nodes cannot leak.
LossAndGrads loss_and_grads(const ModelParams& p, const HopFeatures& fs, std::span<const int> labels,
                            std::span<const Index> train_idx, const ForwardOptions& opts,
                            RngStream& rng);

/// Row-wise argmax, ties to the lowest class index.
std::vector<int> predict(const MatrixXr& logits);

void save_checkpoint(const ModelParams& p, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

} // namespace fsgnn
