#pragma once

#include "fsgnn/graph.hpp"
#include "fsgnn/types.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fsgnn {

/// Dense: comma-separated values. IndexList: comma-separated indices of
/// nonzero (=1) features, with the width supplied separately.
enum class FeatureEncoding { dense, index_list };

struct NodeTable {
  MatrixXr features;
  std::vector<int> labels; ///< as written in the file
};

struct DatasetBundle {
  std::string name;
  Graph graph;           ///< labels remapped to [0, C)
  MatrixXr features;     ///< raw (not yet row-normalized)
  std::vector<int> original_labels; ///< internal class c was original_labels[c]
  Index edge_lines = 0;  ///< body lines of the edge file before symmetrization

  Index num_nodes() const { return graph.num_nodes(); }
  int num_classes() const { return graph.num_classes(); }
  std::span<const int> labels() const { return graph.labels(); }
};

struct SplitSpec {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  /// Throws InputError unless the sets are nonempty, in range and disjoint.
  void validate(Index n) const;
  bool operator==(const SplitSpec&) const = default;
};

/// Header line, then `id <TAB> features <TAB> label` per line.
NodeTable parse_node_file(const std::filesystem::path& path,
                          FeatureEncoding encoding = FeatureEncoding::dense, Index width = 0);
/// Header line, then `src <TAB> dst` per line. Pairs are returned as written.
std::vector<Edge> parse_edge_file(const std::filesystem::path& path);
/// Three lines `train: ...`, `val: ...`, `test: ...` of space-separated ids.
SplitSpec parse_split_file(const std::filesystem::path& path, Index n);

void write_node_file(const std::filesystem::path& path, const MatrixXr& features,
                     std::span<const int> labels);
void write_edge_file(const std::filesystem::path& path, std::span<const Edge> edges);
void write_split_file(const std::filesystem::path& path, const SplitSpec& split);

/// Standard file names inside a dataset directory.
inline constexpr const char* kNodeFileName = "out1_node_feature_label.txt";
inline constexpr const char* kEdgeFileName = "out1_graph_edges.txt";

/// Parses node + edge files of `dir` and remaps labels to [0, C).
DatasetBundle load_dataset(const std::filesystem::path& dir, const std::string& name,
                           FeatureEncoding encoding = FeatureEncoding::dense, Index width = 0);

/// Content hash of features, edges and labels; keys the feature cache.
std::uint64_t dataset_hash(const DatasetBundle& bundle);

/// Per-class stratified split. Throws InputError when a class has fewer than
/// three nodes or the fractions are invalid.
SplitSpec make_random_split(std::span<const int> labels, int num_classes,
                            const std::array<double, 3>& fractions, std::uint64_t seed);

/// n, m, d, C, homophily and, for each split, per-class set fractions.
nlohmann::json ingestion_report(const DatasetBundle& bundle, std::span<const SplitSpec> splits = {});

} // namespace fsgnn
