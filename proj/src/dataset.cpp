#include "fsgnn/dataset.hpp"

#include "fsgnn/hash.hpp"
#include "fsgnn/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace fsgnn {

namespace {

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line, const std::string& why) {
  throw InputError(path.string() + ":" + std::to_string(line) + ": " + why);
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  return is;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\n')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

} // namespace

void SplitSpec::validate(Index n) const {
  if (train.empty() || val.empty() || test.empty()) throw InputError("split: every set must be nonempty");
  std::vector<char> owner(static_cast<std::size_t>(n), 0);
  auto mark = [&](const std::vector<Index>& idx, char tag, const char* set) {
    for (Index i : idx) {
      if (i < 0 || i >= n)
        throw InputError(std::string("split: ") + set + " index " + std::to_string(i) +
                         " outside [0, " + std::to_string(n) + ")");
      if (owner[static_cast<std::size_t>(i)] != 0)
        throw InputError(std::string("split: index ") + std::to_string(i) + " appears more than once (" +
                         set + ")");
      owner[static_cast<std::size_t>(i)] = tag;
    }
  };
  mark(train, 1, "train");
  mark(val, 2, "val");
  mark(test, 3, "test");
}

NodeTable parse_node_file(const std::filesystem::path& path, FeatureEncoding encoding, Index width) {
  if (encoding == FeatureEncoding::index_list && width <= 0)
    throw InputError("index_list feature encoding needs a positive feature width");
  auto is = open_text(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) fail_at(path, 1, "missing header line");
  ++line_no;

  struct Row {
    Index id;
    std::vector<double> values;
    int label;
    std::size_t line;
  };
  std::vector<Row> rows;
  Index dim = encoding == FeatureEncoding::index_list ? width : -1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text, '\t');
    if (fields.size() != 3) fail_at(path, line_no, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    Row r;
    r.line = line_no;
    if (!parse_number(fields[0], r.id) || r.id < 0) fail_at(path, line_no, "bad node id");
    if (!parse_number(fields[2], r.label)) fail_at(path, line_no, "bad label");
    const auto parts = split(fields[1], ',');
    if (encoding == FeatureEncoding::dense) {
      r.values.reserve(parts.size());
      for (auto p : parts) {
        double v = 0;
        if (!parse_number(p, v) || !std::isfinite(v)) fail_at(path, line_no, "bad feature value");
        r.values.push_back(v);
      }
      if (dim < 0) dim = static_cast<Index>(r.values.size());
      if (static_cast<Index>(r.values.size()) != dim)
        fail_at(path, line_no, "feature width " + std::to_string(r.values.size()) + " != " + std::to_string(dim));
    } else {
      r.values.assign(static_cast<std::size_t>(width), 0.0);
      for (auto p : parts) {
        if (trim(p).empty()) continue;
        Index k = 0;
        if (!parse_number(p, k) || k < 0 || k >= width) fail_at(path, line_no, "bad feature index");
        r.values[static_cast<std::size_t>(k)] = 1.0;
      }
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InputError(path.string() + ": no node lines");

  const Index n = static_cast<Index>(rows.size());
  std::vector<const Row*> by_id(static_cast<std::size_t>(n), nullptr);
  for (const auto& r : rows) {
    if (r.id >= n) fail_at(path, r.line, "node id " + std::to_string(r.id) + " breaks contiguous range 0.." + std::to_string(n - 1));
    auto& slot = by_id[static_cast<std::size_t>(r.id)];
    if (slot) fail_at(path, r.line, "duplicate node id " + std::to_string(r.id));
    slot = &r;
  }
  NodeTable t;
  t.features.resize(n, dim);
  t.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Row& r = *by_id[static_cast<std::size_t>(i)];
    for (Index j = 0; j < dim; ++j) t.features(i, j) = r.values[static_cast<std::size_t>(j)];
    t.labels[static_cast<std::size_t>(i)] = r.label;
  }
  return t;
}

std::vector<Edge> parse_edge_file(const std::filesystem::path& path) {
  auto is = open_text(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) fail_at(path, 1, "missing header line");
  ++line_no;
  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text, '\t');
    Edge e;
    if (fields.size() != 2 || !parse_number(fields[0], e.first) || !parse_number(fields[1], e.second))
      fail_at(path, line_no, "expected `src<TAB>dst`");
    edges.push_back(e);
  }
  if (edges.empty()) throw InputError(path.string() + ": no edges (empty graphs are rejected)");
  return edges;
}

SplitSpec parse_split_file(const std::filesystem::path& path, Index n) {
  auto is = open_text(path);
  SplitSpec s;
  bool seen[3] = {false, false, false};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) fail_at(path, line_no, "expected `train:`, `val:` or `test:`");
    const auto key = trim(text.substr(0, colon));
    int which = key == "train" ? 0 : key == "val" ? 1 : key == "test" ? 2 : -1;
    if (which < 0) fail_at(path, line_no, "unknown set '" + std::string(key) + "'");
    if (seen[which]) fail_at(path, line_no, "set listed twice");
    seen[which] = true;
    auto& dst = which == 0 ? s.train : which == 1 ? s.val : s.test;
    std::istringstream ids{std::string(text.substr(colon + 1))};
    std::string tok;
    while (ids >> tok) {
      Index v = 0;
      if (!parse_number(std::string_view(tok), v)) fail_at(path, line_no, "bad index '" + tok + "'");
      dst.push_back(v);
    }
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw InputError(path.string() + ": needs train, val and test lines");
  s.validate(n);
  return s;
}

void write_node_file(const std::filesystem::path& path, const MatrixXr& features, std::span<const int> labels) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  os << "node_id\tfeature\tlabel\n" << std::setprecision(17);
  for (Index i = 0; i < features.rows(); ++i) {
    os << i << '\t';
    for (Index j = 0; j < features.cols(); ++j) os << (j ? "," : "") << features(i, j);
    os << '\t' << labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!os) throw InputError("write failed: " + path.string());
}

void write_edge_file(const std::filesystem::path& path, std::span<const Edge> edges) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  os << "node_id\tnode_id\n";
  for (const auto& [u, v] : edges) os << u << '\t' << v << '\n';
  if (!os) throw InputError("write failed: " + path.string());
}

void write_split_file(const std::filesystem::path& path, const SplitSpec& split) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  auto line = [&](const char* key, const std::vector<Index>& idx) {
    os << key << ':';
    for (Index i : idx) os << ' ' << i;
    os << '\n';
  };
  line("train", split.train);
  line("val", split.val);
  line("test", split.test);
}

DatasetBundle load_dataset(const std::filesystem::path& dir, const std::string& name,
                           FeatureEncoding encoding, Index width) {
  const auto node_path = dir / kNodeFileName;
  const auto edge_path = dir / kEdgeFileName;
  if (!std::filesystem::exists(node_path)) throw InputError("missing node file " + node_path.string());
  if (!std::filesystem::exists(edge_path)) throw InputError("missing edge file " + edge_path.string());
  NodeTable nodes = parse_node_file(node_path, encoding, width);
  const auto edges = parse_edge_file(edge_path);

  std::vector<int> distinct = nodes.labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::map<int, int> remap;
  for (std::size_t c = 0; c < distinct.size(); ++c) remap[distinct[c]] = static_cast<int>(c);
  std::vector<int> labels(nodes.labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = remap.at(nodes.labels[i]);

  DatasetBundle b;
  b.name = name;
  b.graph = build_graph(edges, nodes.features.rows(), std::move(labels), static_cast<int>(distinct.size()));
  b.features = std::move(nodes.features);
  b.original_labels = std::move(distinct);
  b.edge_lines = static_cast<Index>(edges.size());
  return b;
}

std::uint64_t dataset_hash(const DatasetBundle& bundle) {
  Fnv1a h;
  const std::int64_t n = bundle.features.rows(), d = bundle.features.cols();
  h.update_value(n);
  h.update_value(d);
  h.update(std::as_bytes(std::span<const double>(bundle.features.data(), static_cast<std::size_t>(bundle.features.size()))));
  for (const auto& [u, v] : bundle.graph.edge_list()) {
    h.update_value(static_cast<std::int64_t>(u));
    h.update_value(static_cast<std::int64_t>(v));
  }
  for (int y : bundle.graph.labels()) h.update_value(static_cast<std::int32_t>(y));
  return h.digest();
}

SplitSpec make_random_split(std::span<const int> labels, int num_classes,
                            const std::array<double, 3>& fractions, std::uint64_t seed) {
  const double total = fractions[0] + fractions[1] + fractions[2];
  for (double f : fractions)
    if (!(f > 0.0)) throw InputError("split fractions must be positive");
  if (total > 1.0 + 1e-9) throw InputError("split fractions sum above 1");
  const bool exhaustive = std::abs(total - 1.0) <= 1e-9;

  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= num_classes) throw InputError("split: label out of range");
    by_class[static_cast<std::size_t>(y)].push_back(static_cast<Index>(i));
  }
  SplitSpec s;
  for (int c = 0; c < num_classes; ++c) {
    auto& members = by_class[static_cast<std::size_t>(c)];
    const Index count = static_cast<Index>(members.size());
    if (count == 0) continue;
    if (count < 3)
      throw InputError("class " + std::to_string(c) + " has " + std::to_string(count) +
                       " nodes; stratified splitting needs at least 3");
    RngStream rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    shuffle(members.begin(), members.end(), rng);
    std::array<Index, 3> take = {
        static_cast<Index>(std::floor(fractions[0] * static_cast<double>(count))),
        static_cast<Index>(std::floor(fractions[1] * static_cast<double>(count))), 0};
    take[2] = exhaustive ? count - take[0] - take[1]
                         : static_cast<Index>(std::floor(fractions[2] * static_cast<double>(count)));
    for (int k = 0; k < 3; ++k) {
      if (take[static_cast<std::size_t>(k)] == 0) {
        auto largest = std::max_element(take.begin(), take.end());
        --*largest;
        take[static_cast<std::size_t>(k)] = 1;
      }
    }
    auto it = members.begin();
    s.train.insert(s.train.end(), it, it + take[0]);
    it += take[0];
    s.val.insert(s.val.end(), it, it + take[1]);
    it += take[1];
    s.test.insert(s.test.end(), it, it + take[2]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  s.validate(static_cast<Index>(labels.size()));
  return s;
}

nlohmann::json ingestion_report(const DatasetBundle& bundle, std::span<const SplitSpec> splits) {
  nlohmann::json r;
  r["dataset"] = bundle.name;
  r["n"] = bundle.num_nodes();
  r["m"] = bundle.graph.num_edges();
  r["edge_lines"] = bundle.edge_lines;
  r["d"] = bundle.features.cols();
  r["C"] = bundle.num_classes();
  r["homophily_ratio"] = homophily_ratio(bundle.graph);
  r["label_map"] = bundle.original_labels;
  std::vector<Index> class_sizes(static_cast<std::size_t>(bundle.num_classes()), 0);
  for (int y : bundle.labels()) ++class_sizes[static_cast<std::size_t>(y)];
  r["class_sizes"] = class_sizes;

  nlohmann::json split_json = nlohmann::json::array();
  for (const auto& s : splits) {
    nlohmann::json per_class = nlohmann::json::array();
    std::vector<std::array<Index, 3>> counts(class_sizes.size(), {0, 0, 0});
    auto tally = [&](const std::vector<Index>& idx, int k) {
      for (Index i : idx) ++counts[static_cast<std::size_t>(bundle.labels()[static_cast<std::size_t>(i)])][static_cast<std::size_t>(k)];
    };
    tally(s.train, 0);
    tally(s.val, 1);
    tally(s.test, 2);
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const double size = static_cast<double>(std::max<Index>(class_sizes[c], 1));
      per_class.push_back({{"class", c},
                           {"train", counts[c][0] / size},
                           {"val", counts[c][1] / size},
                           {"test", counts[c][2] / size}});
    }
    split_json.push_back({{"train", s.train.size()},
                          {"val", s.val.size()},
                          {"test", s.test.size()},
                          {"per_class", per_class}});
  }
  r["splits"] = split_json;
  return r;
}

} // namespace fsgnn
