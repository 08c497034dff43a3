#include "fsgnn/graph.hpp"

#include <algorithm>
#include <string>

namespace fsgnn {

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (Index u = 0; u < num_nodes(); ++u)
    for (Index v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph build_graph(std::span<const Edge> edges, Index n, std::vector<int> labels, int num_classes) {
  if (n <= 0) throw InputError("graph must have at least one node");
  if (static_cast<Index>(labels.size()) != n) {
    throw InputError("label count " + std::to_string(labels.size()) + " != node count " +
                     std::to_string(n));
  }
  int max_label = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || (num_classes > 0 && labels[i] >= num_classes)) {
      throw InputError("label " + std::to_string(labels[i]) + " of node " + std::to_string(i) +
                       " out of range");
    }
    max_label = std::max(max_label, labels[i]);
  }
  const int classes = num_classes > 0 ? num_classes : max_label + 1;
  if (classes < 2) throw InputError("need at least 2 classes, got " + std::to_string(classes));

  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw InputError("edge " + std::to_string(i) + " (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") has node id outside [0, " + std::to_string(n) + ")");
    }
    if (u == v) continue;
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.col_indices_.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++g.row_offsets_[u + 1];
    g.col_indices_.push_back(v);
  }
  for (Index u = 0; u < n; ++u) g.row_offsets_[u + 1] += g.row_offsets_[u];
  g.labels_ = std::move(labels);
  g.num_classes_ = classes;
  return g;
}

double homophily_ratio(const Graph& g) {
  if (g.num_edges() == 0) throw InputError("homophily ratio undefined for a graph with no edges");
  const auto& y = g.labels();
  Index same = 0;
  for (Index u = 0; u < g.num_nodes(); ++u)
    for (Index v : g.neighbors(u))
      if (u < v && y[u] == y[v]) ++same;
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

Graph permute_nodes(const Graph& g, std::span<const Index> perm) {
  const Index n = g.num_nodes();
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edge_list()) edges.emplace_back(perm[u], perm[v]);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index u = 0; u < n; ++u) labels[perm[u]] = g.labels()[u];
  return build_graph(edges, n, std::move(labels), g.num_classes());
}

} // namespace fsgnn
