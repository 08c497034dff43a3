#pragma once

#include "fsgnn/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace fsgnn {

using Edge = std::pair<Index, Index>;

/// Undirected simple graph in CSR form with per-node class labels.
///
/// Construction goes through build_graph, which symmetrizes, deduplicates and
/// drops self-loops, so every Graph satisfies: (u,v) stored iff (v,u) stored,
/// no (u,u) entries, column indices strictly increasing within a row.
class Graph {
public:
  Graph() = default;

  Index num_nodes() const noexcept { return static_cast<Index>(row_offsets_.size()) - 1; }
  /// Number of undirected edges.
  Index num_edges() const noexcept { return static_cast<Index>(col_indices_.size()) / 2; }
  int num_classes() const noexcept { return num_classes_; }

  Index degree(Index u) const { return row_offsets_[u + 1] - row_offsets_[u]; }
  std::span<const Index> neighbors(Index u) const {
    return {col_indices_.data() + row_offsets_[u], static_cast<std::size_t>(degree(u))};
  }

  const std::vector<Index>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<Index>& col_indices() const noexcept { return col_indices_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Canonical undirected edge list, u < v, sorted.
  std::vector<Edge> edge_list() const;

  bool operator==(const Graph&) const = default;

private:
  friend Graph build_graph(std::span<const Edge>, Index, std::vector<int>, int);

  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

/// Builds a Graph from possibly directed, duplicated pairs. When
/// `num_classes` is 0 the class count is max(label) + 1. Throws InputError on
/// out-of-range ids or labels, or when fewer than two classes result.
Graph build_graph(std::span<const Edge> edges, Index n, std::vector<int> labels,
                  int num_classes = 0);

/// Fraction of undirected edges whose endpoints share a label.
double homophily_ratio(const Graph& g);

/// Returns a copy of `g` with node u renamed perm[u].
Graph permute_nodes(const Graph& g, std::span<const Index> perm);

} // namespace fsgnn
