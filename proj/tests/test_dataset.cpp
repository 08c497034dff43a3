#include "fsgnn/dataset.hpp"
#include "fsgnn/harness.hpp"
#include "fsgnn/synthetic.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>

using namespace fsgnn;
using fsgnn::testing::TempDir;

namespace {

std::filesystem::path write(const std::filesystem::path& p, const std::string& body) {
  std::ofstream(p) << body;
  return p;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

constexpr const char* kNodeHeader = "node_id\tfeature\tlabel\n";
constexpr const char* kEdgeHeader = "node_id\tnode_id\n";

} // namespace

TEST(NodeFile, TwoLineExample) {
  TempDir d("fsgnn_nodes");
  const auto t = parse_node_file(write(d / "n.txt", std::string(kNodeHeader) + "0\t1,0\t0\n1\t0,1\t1\n"));
  EXPECT_EQ(t.features, MatrixXr::Identity(2, 2));
  EXPECT_EQ(t.labels, (std::vector<int>{0, 1}));
}

TEST(NodeFile, IdsAreSortedAndRealValuesAccepted) {
  TempDir d("fsgnn_nodes");
  const auto t = parse_node_file(write(d / "n.txt", std::string(kNodeHeader) + "1\t0.25,-3e2\t4\n0\t7,8\t9\n"));
  EXPECT_EQ(t.features(0, 0), 7.0);
  EXPECT_EQ(t.features(1, 0), 0.25);
  EXPECT_EQ(t.features(1, 1), -300.0);
  EXPECT_EQ(t.labels, (std::vector<int>{9, 4}));
}

TEST(NodeFile, IndexListEncoding) {
  TempDir d("fsgnn_nodes");
  const auto t = parse_node_file(write(d / "n.txt", std::string(kNodeHeader) + "0\t0,3\t1\n1\t\t0\n"),
                                 FeatureEncoding::index_list, 4);
  MatrixXr x = MatrixXr::Zero(2, 4);
  x(0, 0) = x(0, 3) = 1;
  EXPECT_EQ(t.features, x);
  EXPECT_THROW(parse_node_file(d / "n.txt", FeatureEncoding::index_list, 3), InputError);
  EXPECT_THROW(parse_node_file(d / "n.txt", FeatureEncoding::index_list, 0), InputError);
}

TEST(NodeFile, DuplicateIdNamesTheId) {
  TempDir d("fsgnn_nodes");
  std::string body = kNodeHeader;
  for (int i = 0; i < 6; ++i) body += std::to_string(i) + "\t1\t0\n";
  body += "5\t1\t0\n";
  const auto msg = error_of([&] { parse_node_file(write(d / "n.txt", body)); });
  EXPECT_NE(msg.find("duplicate node id 5"), std::string::npos) << msg;
}

TEST(NodeFile, MalformedLineReportsLineNumber) {
  TempDir d("fsgnn_nodes");
  const auto msg = error_of([&] {
    parse_node_file(write(d / "n.txt", std::string(kNodeHeader) + "0\t1,0\t0\n1\t0,x\t1\n"));
  });
  EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
  const auto width = error_of([&] {
    parse_node_file(write(d / "w.txt", std::string(kNodeHeader) + "0\t1,0\t0\n1\t0,1,1\t1\n"));
  });
  EXPECT_NE(width.find(":3:"), std::string::npos) << width;
}

TEST(NodeFile, NonContiguousIdsRejected) {
  TempDir d("fsgnn_nodes");
  EXPECT_THROW(parse_node_file(write(d / "n.txt", std::string(kNodeHeader) + "0\t1\t0\n2\t1\t0\n")), InputError);
  EXPECT_THROW(parse_node_file(write(d / "e.txt", kNodeHeader)), InputError);
  EXPECT_THROW(parse_node_file(d / "missing.txt"), InputError);
}

TEST(EdgeFile, ExampleAndEmptyBody) {
  TempDir d("fsgnn_edges");
  EXPECT_EQ(parse_edge_file(write(d / "e.txt", std::string(kEdgeHeader) + "0\t1\n")), (std::vector<Edge>{{0, 1}}));
  EXPECT_THROW(parse_edge_file(write(d / "empty.txt", kEdgeHeader)), InputError);
  EXPECT_THROW(parse_edge_file(write(d / "bad.txt", std::string(kEdgeHeader) + "0 1\n")), InputError);
}

TEST(EdgeFile, OutOfRangeCaughtAtLoad) {
  TempDir d("fsgnn_edges");
  write(d / kNodeFileName, std::string(kNodeHeader) + "0\t1\t0\n1\t1\t1\n");
  write(d / kEdgeFileName, std::string(kEdgeHeader) + "0\t2\n");
  EXPECT_THROW(load_dataset(d.path(), "x"), InputError);
}

TEST(SplitFile, ValidExample) {
  TempDir d("fsgnn_split");
  const auto s = parse_split_file(write(d / "s.txt", "train: 0 1\nval: 2\ntest: 3 4\n"), 5);
  EXPECT_EQ(s.train, (std::vector<Index>{0, 1}));
  EXPECT_EQ(s.val, (std::vector<Index>{2}));
  EXPECT_EQ(s.test, (std::vector<Index>{3, 4}));
}

TEST(SplitFile, Errors) {
  TempDir d("fsgnn_split");
  const auto overlap = error_of([&] { parse_split_file(write(d / "a.txt", "train: 0 2\nval: 2\ntest: 3\n"), 5); });
  EXPECT_NE(overlap.find("2"), std::string::npos);
  EXPECT_FALSE(overlap.empty());
  EXPECT_THROW(parse_split_file(write(d / "b.txt", "train: 0\nval: 1\ntest: 5\n"), 5), InputError);
  EXPECT_THROW(parse_split_file(write(d / "c.txt", "train: 0\nval: 1\n"), 5), InputError);
  EXPECT_THROW(parse_split_file(write(d / "d.txt", "train: 0\nval:\ntest: 1\n"), 5), InputError);
  EXPECT_THROW(parse_split_file(write(d / "e.txt", "train: 0\nvalid: 1\ntest: 2\n"), 5), InputError);
}

TEST(RandomSplit, BalancedTwoClassCounts) {
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
  const auto s = make_random_split(labels, 2, {0.48, 0.32, 0.20}, 7);
  for (int c = 0; c < 2; ++c) {
    auto count = [&](const std::vector<Index>& v) {
      return std::count_if(v.begin(), v.end(), [&](Index i) { return labels[static_cast<std::size_t>(i)] == c; });
    };
    EXPECT_EQ(count(s.train), 24);
    EXPECT_EQ(count(s.val), 16);
    EXPECT_EQ(count(s.test), 10);
  }
  EXPECT_EQ(make_random_split(labels, 2, {0.48, 0.32, 0.20}, 7), s);
  EXPECT_NE(make_random_split(labels, 2, {0.48, 0.32, 0.20}, 8), s);
}

TEST(RandomSplit, SmallClassesStayNonempty) {
  // class sizes in the style of a small heterophilous benchmark
  std::vector<int> labels;
  const std::vector<int> sizes{3, 4, 10, 33, 201};
  for (int c = 0; c < 5; ++c) labels.insert(labels.end(), static_cast<std::size_t>(sizes[static_cast<std::size_t>(c)]), c);
  const auto s = make_random_split(labels, 5, {0.48, 0.32, 0.20}, 1);
  for (int c = 0; c < 5; ++c)
    for (const auto* set : {&s.train, &s.val, &s.test})
      EXPECT_TRUE(std::any_of(set->begin(), set->end(), [&](Index i) { return labels[static_cast<std::size_t>(i)] == c; }));
  std::vector<int> tiny{0, 0, 1, 1, 1};
  EXPECT_THROW(make_random_split(tiny, 2, {0.48, 0.32, 0.20}, 1), InputError);
  EXPECT_THROW(make_random_split(labels, 5, {0.6, 0.3, 0.2}, 1), InputError);
  EXPECT_THROW(make_random_split(labels, 5, {0.6, 0.0, 0.2}, 1), InputError);
}

TEST(RandomSplit, PropertyDisjointAndInRange) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RngStream rng(seed);
    const Index n = 20 + static_cast<Index>(rng.below(200));
    const int c = 2 + static_cast<int>(rng.below(4));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % c);
    const auto s = make_random_split(labels, c, {0.48, 0.32, 0.20}, seed);
    std::set<Index> all;
    for (const auto* set : {&s.train, &s.val, &s.test}) {
      EXPECT_FALSE(set->empty());
      for (Index i : *set) {
        EXPECT_TRUE(all.insert(i).second);
        EXPECT_LT(i, n);
      }
    }
    EXPECT_EQ(static_cast<Index>(all.size()), n);
  }
}

TEST(Ingestion, LosslessRoundTrip) {
  TempDir d("fsgnn_roundtrip");
  CsbmOptions o;
  o.nodes = 60;
  o.seed = 4;
  auto bundle = make_csbm(o);
  bundle.features(0, 0) = 0.1 + 1e-17; // nontrivial decimal
  bundle.features(1, 1) = -1.0 / 3.0;
  write_node_file(d / kNodeFileName, bundle.features, bundle.labels());
  write_edge_file(d / kEdgeFileName, bundle.graph.edge_list());
  const auto back = load_dataset(d.path(), bundle.name);
  EXPECT_EQ(back.features, bundle.features);
  EXPECT_EQ(back.graph.edge_list(), bundle.graph.edge_list());
  EXPECT_TRUE(std::equal(back.labels().begin(), back.labels().end(), bundle.labels().begin()));
  EXPECT_EQ(dataset_hash(back), dataset_hash(bundle));

  const auto split = make_random_split(bundle.labels(), bundle.num_classes(), {0.5, 0.3, 0.2}, 2);
  write_split_file(d / "s.txt", split);
  EXPECT_EQ(parse_split_file(d / "s.txt", bundle.num_nodes()), split);
}

TEST(Ingestion, LabelsRemappedToContiguousRange) {
  TempDir d("fsgnn_remap");
  write(d / kNodeFileName, std::string(kNodeHeader) + "0\t1\t7\n1\t1\t3\n2\t1\t7\n");
  write(d / kEdgeFileName, std::string(kEdgeHeader) + "0\t1\n1\t2\n2\t1\n");
  const auto b = load_dataset(d.path(), "remap");
  EXPECT_EQ(b.num_classes(), 2);
  EXPECT_EQ(std::vector<int>(b.labels().begin(), b.labels().end()), (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(b.original_labels, (std::vector<int>{3, 7}));
  EXPECT_EQ(b.graph.num_edges(), 2);
  EXPECT_EQ(b.edge_lines, 3);

  const std::vector<SplitSpec> splits{{{0}, {1}, {2}}};
  const auto r = ingestion_report(b, splits);
  EXPECT_EQ(r["n"], 3);
  EXPECT_EQ(r["m"], 2);
  EXPECT_EQ(r["d"], 1);
  EXPECT_EQ(r["C"], 2);
  EXPECT_DOUBLE_EQ(r["homophily_ratio"].get<double>(), 0.0);
  EXPECT_EQ(r["label_map"], nlohmann::json::array({3, 7}));
  EXPECT_EQ(r["splits"].size(), 1u);
}

TEST(Ingestion, MissingFilesNamed) {
  TempDir d("fsgnn_missing");
  write(d / kNodeFileName, std::string(kNodeHeader) + "0\t1\t0\n");
  const auto msg = error_of([&] { load_dataset(d.path(), "x"); });
  EXPECT_NE(msg.find(kEdgeFileName), std::string::npos) << msg;
}

TEST(Ingestion, FuzzedFilesRejectedOrValid) {
  TempDir d("fsgnn_fuzz");
  const std::string good = std::string(kNodeHeader) + "0\t1,0\t0\n1\t0,1\t1\n2\t1,1\t0\n";
  const std::string alphabet = "0123456789\t,\n.-ex ";
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    RngStream rng(seed);
    std::string body = good;
    const int edits = 1 + static_cast<int>(rng.below(4));
    for (int e = 0; e < edits; ++e) {
      const std::size_t head = std::string(kNodeHeader).size();
      const auto pos = head + rng.below(body.size() - head);
      const char ch = alphabet[rng.below(alphabet.size())];
      switch (rng.below(3)) {
      case 0: body[pos] = ch; break;
      case 1: body.insert(pos, 1, ch); break;
      default: body.erase(pos, 1); break;
      }
    }
    const auto p = write(d / "n.txt", body);
    try {
      const auto t = parse_node_file(p);
      // anything accepted must be complete and well formed
      EXPECT_EQ(t.features.rows(), static_cast<Index>(t.labels.size()));
      EXPECT_TRUE(t.features.allFinite());
    } catch (const InputError&) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 100);
}

TEST(Ingestion, FuzzedSplitsNeverPartiallyAccepted) {
  TempDir d("fsgnn_fuzz_split");
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RngStream rng(seed);
    std::string body;
    for (const char* key : {"train:", "val:", "test:"}) {
      body += key;
      const int k = static_cast<int>(rng.below(4));
      for (int i = 0; i < k; ++i) body += " " + std::to_string(static_cast<int>(rng.below(14)) - 2);
      body += "\n";
    }
    const auto p = write(d / "s.txt", body);
    try {
      const auto s = parse_split_file(p, 10);
      EXPECT_NO_THROW(s.validate(10));
    } catch (const InputError&) {
    }
  }
}
