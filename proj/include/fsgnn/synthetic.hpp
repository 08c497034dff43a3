#pragma once

#include "fsgnn/dataset.hpp"
#include "fsgnn/sparse.hpp"

#include <cstdint>

namespace fsgnn {

/// Graph made of disjoint node pairs where exactly one propagated branch
/// carries a clean label signal.
///
/// `planted = self_loop`: each pair shares a class and the two feature rows
/// are e(y) + R*u and e(y) + R*(1-u), so (A+I)X recovers e(y) exactly while X
/// and AX stay noisy. `planted = none`: pair members have different classes
/// and each row holds its partner's one-hot, so AX is clean and X is not.
struct PlantedPairOptions {
  Index pairs_per_class = 20;
  int classes = 3;
  Index noise_dims = 16;
  double noise_scale = 4.0;
  LoopMode planted = LoopMode::self_loop;
  std::uint64_t seed = 0;
};

DatasetBundle make_planted_pairs(const PlantedPairOptions& opts);

/// Contextual stochastic block model: balanced classes, each edge joins
/// same-class endpoints with probability `homophily`, and features are
/// bag-of-words with a class-specific block of elevated word rates.
struct CsbmOptions {
  Index nodes = 200;
  int classes = 4;
  Index dims = 32;
  double avg_degree = 6.0;
  double homophily = 0.8;
  double p_in = 0.5;  ///< word rate inside the node's class block
  double p_out = 0.1; ///< word rate elsewhere
  std::uint64_t seed = 0;
};

DatasetBundle make_csbm(const CsbmOptions& opts);

} // namespace fsgnn
