#include "fsgnn/synthetic.hpp"

#include "fsgnn/rng.hpp"

#include <numeric>

namespace fsgnn {

DatasetBundle make_planted_pairs(const PlantedPairOptions& opts) {
  if (opts.classes < 2 || opts.pairs_per_class < 2) throw InputError("planted pairs: too small");
  RngStream rng(opts.seed);
  const Index n_pairs = opts.pairs_per_class * opts.classes;
  const Index n = 2 * n_pairs;
  const Index dims = opts.classes + opts.noise_dims;

  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<Edge> edges;
  MatrixXr x = MatrixXr::Zero(n, dims);

  // Fixed multiset of noise levels so every row has the same L1 norm.
  std::vector<double> levels(static_cast<std::size_t>(dims));
  for (Index k = 0; k < dims; ++k) levels[static_cast<std::size_t>(k)] = (static_cast<double>(k) + 0.5) / static_cast<double>(dims);

  for (Index p = 0; p < n_pairs; ++p) {
    const Index a = 2 * p, b = 2 * p + 1;
    edges.emplace_back(a, b);
    const int ya = static_cast<int>(p % opts.classes);
    int yb = ya;
    if (opts.planted == LoopMode::none) {
      yb = (ya + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.classes - 1)))) % opts.classes;
    }
    labels[static_cast<std::size_t>(a)] = ya;
    labels[static_cast<std::size_t>(b)] = yb;
    if (opts.planted == LoopMode::self_loop) {
      auto u = levels;
      shuffle(u.begin(), u.end(), rng);
      for (Index k = 0; k < dims; ++k) {
        x(a, k) = opts.noise_scale * u[static_cast<std::size_t>(k)];
        x(b, k) = opts.noise_scale * (1.0 - u[static_cast<std::size_t>(k)]);
      }
      x(a, ya) += 1.0;
      x(b, yb) += 1.0;
    } else {
      x(a, yb) = 1.0;
      x(b, ya) = 1.0;
    }
  }

  // Interleave classes so node order carries no label information.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  shuffle(perm.begin(), perm.end(), rng);
  Graph g = build_graph(edges, n, labels, opts.classes);
  g = permute_nodes(g, perm);
  MatrixXr xp(n, dims);
  for (Index u = 0; u < n; ++u) xp.row(perm[static_cast<std::size_t>(u)]) = x.row(u);

  DatasetBundle bundle;
  bundle.name = opts.planted == LoopMode::self_loop ? "planted_selfloop" : "planted_noloop";
  bundle.graph = std::move(g);
  bundle.features = std::move(xp);
  bundle.original_labels.resize(static_cast<std::size_t>(opts.classes));
  std::iota(bundle.original_labels.begin(), bundle.original_labels.end(), 0);
  bundle.edge_lines = static_cast<Index>(edges.size());
  return bundle;
}

DatasetBundle make_csbm(const CsbmOptions& opts) {
  if (opts.classes < 2 || opts.nodes < 3 * opts.classes) throw InputError("csbm: too small");
  RngStream rng(opts.seed);
  const Index n = opts.nodes;
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(opts.classes));
  for (Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(i % opts.classes);
    members[static_cast<std::size_t>(i % opts.classes)].push_back(i);
  }

  const Index target_edges = static_cast<Index>(opts.avg_degree * static_cast<double>(n) / 2.0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(target_edges));
  for (Index e = 0; e < target_edges; ++e) {
    const Index u = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    const int yu = labels[static_cast<std::size_t>(u)];
    int yv = yu;
    if (rng.uniform() >= opts.homophily) {
      yv = (yu + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.classes - 1)))) % opts.classes;
    }
    const auto& pool = members[static_cast<std::size_t>(yv)];
    const Index v = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    if (u != v) edges.emplace_back(u, v);
  }

  const Index block = std::max<Index>(1, opts.dims / opts.classes);
  MatrixXr x = MatrixXr::Zero(n, opts.dims);
  for (Index i = 0; i < n; ++i) {
    const Index lo = labels[static_cast<std::size_t>(i)] * block;
    for (Index k = 0; k < opts.dims; ++k) {
      const double p = (k >= lo && k < lo + block) ? opts.p_in : opts.p_out;
      x(i, k) = rng.uniform() < p ? 1.0 : 0.0;
    }
  }

  DatasetBundle bundle;
  bundle.name = "csbm";
  bundle.graph = build_graph(edges, n, std::move(labels), opts.classes);
  bundle.features = std::move(x);
  bundle.original_labels.resize(static_cast<std::size_t>(opts.classes));
  std::iota(bundle.original_labels.begin(), bundle.original_labels.end(), 0);
  bundle.edge_lines = static_cast<Index>(edges.size());
  return bundle;
}

} // namespace fsgnn
