#include "fsgnn/adam.hpp"
#include "fsgnn/grad_check.hpp"
#include "fsgnn/layers.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace fsgnn;
using namespace fsgnn::nn;
using fsgnn::testing::random_matrix;

namespace {

constexpr double kFdTol = 1e-6;

struct Shape {
  Index rows, cols;
};
constexpr std::array<Shape, 3> kShapes{{{3, 4}, {1, 5}, {6, 2}}};

/// Projects a matrix output onto fixed random weights so any layer becomes a
/// scalar loss for finite differences.
double project(const MatrixXr& y, const MatrixXr& r) { return y.cwiseProduct(r).sum(); }

double check(MatrixXr& value, const MatrixXr& analytic, const std::function<double()>& loss) {
  const std::vector<GradCheckTensor<double>> t{{"t", &value, &analytic}};
  return grad_check<double>(loss, t).max_rel_error();
}

} // namespace

TEST(Linear, IdentityInput) {
  MatrixXr w(2, 2);
  w << 1, 2, 3, 4;
  EXPECT_EQ(linear_forward<double>(MatrixXr::Identity(2, 2), w, MatrixXr::Zero(1, 2)), w);
}

TEST(Linear, ZeroUpstreamGivesZeroGrads) {
  const MatrixXr x = random_matrix(3, 4, 1), w = random_matrix(4, 2, 2);
  const auto g = linear_backward<double>(MatrixXr::Zero(3, 2), x, w);
  EXPECT_EQ(g.input.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.weight.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.bias.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Linear, BiasBroadcasts) {
  MatrixXr b(1, 2);
  b << 1, -1;
  const MatrixXr y = linear_forward<double>(MatrixXr::Zero(3, 2), MatrixXr::Zero(2, 2), b);
  for (Index r = 0; r < 3; ++r) EXPECT_EQ(y.row(r), b.row(0));
}

TEST(Linear, FiniteDifferences) {
  std::uint64_t seed = 10;
  for (const auto s : kShapes) {
    MatrixXr x = random_matrix(s.rows, s.cols, seed++), w = random_matrix(s.cols, 3, seed++);
    MatrixXr b = random_matrix(1, 3, seed++);
    const MatrixXr r = random_matrix(s.rows, 3, seed++);
    auto loss = [&] { return project(linear_forward(x, w, b), r); };
    const auto g = linear_backward(r, x, w);
    EXPECT_LT(check(x, g.input, loss), kFdTol);
    EXPECT_LT(check(w, g.weight, loss), kFdTol);
    EXPECT_LT(check(b, g.bias, loss), kFdTol);
  }
}

TEST(Linear, RejectsShapeMismatch) {
  EXPECT_THROW(linear_forward<double>(MatrixXr::Zero(2, 3), MatrixXr::Zero(2, 2), MatrixXr::Zero(1, 2)),
               ShapeError);
  EXPECT_THROW(linear_forward<double>(MatrixXr::Zero(2, 2), MatrixXr::Zero(2, 2), MatrixXr::Zero(1, 3)),
               ShapeError);
}

TEST(Relu, ForwardAndSubgradient) {
  MatrixXr x(1, 3);
  x << -1, 0, 2;
  MatrixXr y(1, 3);
  y << 0, 0, 2;
  EXPECT_EQ(relu_forward(x), y);
  MatrixXr expected(1, 3);
  expected << 0, 0, 1;
  EXPECT_EQ(relu_backward<double>(MatrixXr::Ones(1, 3), x), expected);
}

TEST(Relu, FiniteDifferencesAwayFromZero) {
  std::uint64_t seed = 30;
  for (const auto s : kShapes) {
    MatrixXr x = random_matrix(s.rows, s.cols, seed++);
    for (Index i = 0; i < x.size(); ++i)
      if (std::abs(x.data()[i]) < 0.05) x.data()[i] = 0.5;
    const MatrixXr r = random_matrix(s.rows, s.cols, seed++);
    auto loss = [&] { return project(relu_forward(x), r); };
    EXPECT_LT(check(x, relu_backward(r, x), loss), kFdTol);
  }
}

TEST(Dropout, IdentityCases) {
  RngStream rng(1);
  const MatrixXr x = random_matrix(4, 5, 2);
  EXPECT_EQ(dropout_forward(x, 0.0, rng, true).output, x);
  EXPECT_EQ(dropout_forward(x, 0.7, rng, false).output, x);
  EXPECT_EQ(rng.counter(), 0u);
}

TEST(Dropout, RejectsInvalidRate) {
  RngStream rng(1);
  const MatrixXr x = MatrixXr::Ones(2, 2);
  EXPECT_THROW(dropout_forward(x, 1.0, rng, true), InputError);
  EXPECT_THROW(dropout_forward(x, -0.1, rng, true), InputError);
}

TEST(Dropout, SurvivorMeanIsUnbiased) {
  RngStream rng(42);
  const MatrixXr x = MatrixXr::Constant(1000, 1000, 2.0);
  const auto d = dropout_forward(x, 0.5, rng, true);
  EXPECT_NEAR(d.output.mean(), 2.0, 0.02);
  const double kept = static_cast<double>((d.mask.array() != 0).count()) / 1e6;
  EXPECT_NEAR(kept, 0.5, 0.005);
  for (Index i = 0; i < d.mask.size(); ++i) {
    const double m = d.mask.data()[i];
    ASSERT_TRUE(m == 0.0 || m == 2.0);
  }
}

TEST(Dropout, ReproducibleAndAdvancesStream) {
  const MatrixXr x = random_matrix(7, 9, 5);
  RngStream a(9), b(9);
  const auto da = dropout_forward(x, 0.6, a, true);
  const auto db = dropout_forward(x, 0.6, b, true);
  EXPECT_EQ(da.output, db.output);
  EXPECT_EQ(a.counter(), 63u);
  // inplace variant draws the same mask
  RngStream c(9);
  MatrixXr y = x;
  dropout_inplace(y, 0.6, c);
  EXPECT_EQ(y, da.output);
}

TEST(Dropout, MatchesSequentialUniformRule) {
  const MatrixXr x = MatrixXr::Ones(3, 50);
  RngStream rng(77), ref(77);
  MatrixXr y = x;
  dropout_inplace(y, 0.3, rng);
  for (Index i = 0; i < y.size(); ++i) {
    const double expected = ref.uniform() < 0.3 ? 0.0 : 1.0 / 0.7;
    EXPECT_EQ(y.data()[i], expected);
  }
}

TEST(Dropout, BackwardReusesMask) {
  RngStream rng(3);
  const MatrixXr x = random_matrix(5, 4, 6);
  const auto d = dropout_forward(x, 0.5, rng, true);
  const MatrixXr g = random_matrix(5, 4, 7);
  EXPECT_EQ(dropout_backward(g, d.mask), g.cwiseProduct(d.mask));
  EXPECT_EQ(dropout_backward<double>(g, MatrixXr()), g);
}

TEST(L2Normalize, Examples) {
  MatrixXr x(2, 2);
  x << 3, 4, 0, 0;
  const MatrixXr y = l2_row_normalize_forward(x);
  EXPECT_NEAR(y(0, 0), 0.6, 1e-16);
  EXPECT_NEAR(y(0, 1), 0.8, 1e-16);
  EXPECT_EQ(y(1, 0), 0.0);
  EXPECT_EQ(y(1, 1), 0.0);
}

TEST(L2Normalize, UnitRows) {
  const MatrixXr y = l2_row_normalize_forward(random_matrix(20, 6, 8));
  for (Index r = 0; r < y.rows(); ++r) EXPECT_NEAR(y.row(r).norm(), 1.0, 1e-12);
}

TEST(L2Normalize, FiniteDifferences) {
  std::uint64_t seed = 50;
  for (const auto s : kShapes) {
    MatrixXr x = random_matrix(s.rows, s.cols, seed++);
    const MatrixXr r = random_matrix(s.rows, s.cols, seed++);
    auto loss = [&] { return project(l2_row_normalize_forward(x), r); };
    EXPECT_LT(check(x, l2_row_normalize_backward(r, x), loss), kFdTol);
  }
}

TEST(Softmax, Examples) {
  const VectorXr third = softmax_forward<double>(VectorXr::Ones(3));
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(third(i), 1.0 / 3.0, 1e-16);
  const VectorXr seventh = softmax_forward<double>(VectorXr::Constant(7, 1.0));
  for (Index i = 0; i < 7; ++i) EXPECT_NEAR(seventh(i), 1.0 / 7.0, 1e-16);
  VectorXr g(2);
  g << 0, std::log(3.0);
  const VectorXr p = softmax_forward(g);
  EXPECT_NEAR(p(0), 0.25, 1e-15);
  EXPECT_NEAR(p(1), 0.75, 1e-15);
}

TEST(Softmax, PositiveNormalizedShiftInvariant) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const VectorXr g = random_matrix(9, 1, seed, -30, 30).col(0);
    const VectorXr p = softmax_forward(g);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GT(p.minCoeff(), 0.0);
    const VectorXr q = softmax_forward<double>((g.array() + 123.0).matrix());
    EXPECT_LE((p - q).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Softmax, FiniteDifferences) {
  for (Index len : {1, 3, 7}) {
    MatrixXr g = random_matrix(len, 1, static_cast<std::uint64_t>(len));
    const VectorXr r = random_matrix(len, 1, 100 + static_cast<std::uint64_t>(len)).col(0);
    auto loss = [&] { return softmax_forward<double>(g.col(0)).dot(r); };
    const VectorXr p = softmax_forward<double>(g.col(0));
    const MatrixXr analytic = softmax_backward<double>(r, p);
    EXPECT_LT(check(g, analytic, loss), kFdTol);
  }
}

TEST(Aggregate, SingleBranchIsIdentity) {
  const std::vector<MatrixXr> one{random_matrix(4, 3, 1)};
  EXPECT_EQ(aggregate_forward<double>(one, Aggregation::concat), one[0]);
  EXPECT_EQ(aggregate_forward<double>(one, Aggregation::sum), one[0]);
}

TEST(Aggregate, ConcatWidth) {
  std::vector<MatrixXr> b;
  for (std::uint64_t i = 0; i < 7; ++i) b.push_back(random_matrix(5, 64, i));
  const MatrixXr c = aggregate_forward<double>(b, Aggregation::concat);
  EXPECT_EQ(c.rows(), 5);
  EXPECT_EQ(c.cols(), 448);
  EXPECT_EQ(c.middleCols(128, 64), b[2]);
  const MatrixXr s = aggregate_forward<double>(b, Aggregation::sum);
  EXPECT_EQ(s.cols(), 64);
}

TEST(Aggregate, FiniteDifferences) {
  for (auto scheme : {Aggregation::concat, Aggregation::sum}) {
    std::vector<MatrixXr> b{random_matrix(3, 4, 1), random_matrix(3, 4, 2), random_matrix(3, 4, 3)};
    const MatrixXr r = random_matrix(3, scheme == Aggregation::concat ? 12 : 4, 4);
    const std::vector<Index> widths{4, 4, 4};
    const auto grads = aggregate_backward<double>(r, widths, scheme);
    for (std::size_t l = 0; l < b.size(); ++l) {
      auto loss = [&] { return project(aggregate_forward<double>(b, scheme), r); };
      EXPECT_LT(check(b[l], grads[l], loss), kFdTol);
    }
  }
}

TEST(Aggregate, RejectsMismatchedShapes) {
  const std::vector<MatrixXr> rows{MatrixXr::Zero(2, 2), MatrixXr::Zero(3, 2)};
  EXPECT_THROW(aggregate_forward<double>(rows, Aggregation::concat), ShapeError);
  const std::vector<MatrixXr> cols{MatrixXr::Zero(2, 2), MatrixXr::Zero(2, 3)};
  EXPECT_THROW(aggregate_forward<double>(cols, Aggregation::sum), ShapeError);
}

TEST(Xent, UniformLogits) {
  const std::vector<int> y{0, 1, 2, 3};
  const std::vector<Index> idx{0, 1, 2, 3};
  EXPECT_NEAR(softmax_xent_forward<double>(MatrixXr::Zero(4, 4), y, idx).loss, std::log(4.0), 1e-15);
}

TEST(Xent, LargeMarginApproachesZero) {
  MatrixXr logits(2, 3);
  logits << 1000, 0, 0, 0, -500, 500;
  const std::vector<int> y{0, 2};
  const std::vector<Index> idx{0, 1};
  const auto r = softmax_xent_forward(logits, y, idx);
  EXPECT_LT(r.loss, 1e-100);
  EXPECT_TRUE(std::isfinite(r.loss));
}

TEST(Xent, FiniteDifferencesOnSubset) {
  MatrixXr logits = random_matrix(6, 3, 12, -3, 3);
  const std::vector<int> y{0, 2, 1, 1, 0, 2};
  const std::vector<Index> idx{1, 3, 4};
  auto loss = [&] { return softmax_xent_forward(logits, y, idx).loss; };
  const auto r = softmax_xent_forward(logits, y, idx);
  const MatrixXr g = softmax_xent_backward<double>(r.probabilities, y, idx);
  EXPECT_LT(check(logits, g, loss), kFdTol);
  for (Index row : {0, 2, 5}) EXPECT_EQ(g.row(row).cwiseAbs().sum(), 0.0);
}

TEST(Xent, RejectsEmptyIndex) {
  const std::vector<int> y{0};
  EXPECT_THROW(softmax_xent_forward<double>(MatrixXr::Zero(1, 2), y, {}), InputError);
}

TEST(Adam, ZeroGradNoDecayLeavesParams) {
  MatrixXr p = random_matrix(3, 3, 1);
  const MatrixXr before = p;
  const MatrixXr g = MatrixXr::Zero(3, 3);
  AdamState<double> st;
  std::vector<MatrixXr*> ps{&p};
  std::vector<const MatrixXr*> gs{&g};
  for (int i = 0; i < 5; ++i) adam_step<double>(ps, gs, st, AdamHyper{});
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 5);
}

TEST(Adam, FirstStepMovesBySignTimesLr) {
  MatrixXr p = MatrixXr::Zero(1, 4);
  MatrixXr g(1, 4);
  g << 3.0, -0.01, 1e-3, -250.0;
  AdamState<double> st;
  std::vector<MatrixXr*> ps{&p};
  std::vector<const MatrixXr*> gs{&g};
  AdamHyper h;
  h.lr = 0.05;
  adam_step<double>(ps, gs, st, h);
  for (Index i = 0; i < 4; ++i) {
    EXPECT_LE(std::abs(p(0, i)), h.lr * (1 + 1e-9));
    EXPECT_GT(std::abs(p(0, i)), h.lr * 0.99);
    EXPECT_EQ(std::signbit(p(0, i)), !std::signbit(g(0, i)));
  }
}

TEST(Adam, ConvergesOnQuadratic) {
  MatrixXr w = MatrixXr::Ones(1, 1);
  MatrixXr g(1, 1);
  AdamState<double> st;
  std::vector<MatrixXr*> ps{&w};
  std::vector<const MatrixXr*> gs{&g};
  AdamHyper h;
  h.lr = 0.1;
  for (int i = 0; i < 100; ++i) {
    g(0, 0) = 2 * w(0, 0);
    adam_step<double>(ps, gs, st, h);
  }
  EXPECT_LT(std::abs(w(0, 0)), 0.1);
}

TEST(Adam, WeightDecayIsFoldedIntoGradient) {
  MatrixXr a = MatrixXr::Constant(1, 1, 2.0), b = a;
  const MatrixXr g = MatrixXr::Constant(1, 1, 0.3);
  const MatrixXr g_folded = MatrixXr::Constant(1, 1, 0.3 + 0.1 * 2.0);
  AdamState<double> sa, sb;
  std::vector<MatrixXr*> pa{&a}, pb{&b};
  std::vector<const MatrixXr*> ga{&g}, gb{&g_folded};
  AdamHyper decay;
  decay.weight_decay = 0.1;
  adam_step<double>(pa, ga, sa, decay);
  adam_step<double>(pb, gb, sb, AdamHyper{});
  EXPECT_EQ(a, b);
}

TEST(Adam, IdenticalRunsAreBitwiseEqual) {
  auto run = [] {
    MatrixXr p = random_matrix(4, 3, 5);
    AdamState<double> st;
    std::vector<MatrixXr*> ps{&p};
    for (int i = 0; i < 50; ++i) {
      const MatrixXr g = p.array().sin().matrix();
      std::vector<const MatrixXr*> gs{&g};
      adam_step<double>(ps, gs, st, AdamHyper{});
    }
    return p;
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, PerTensorHyperparameters) {
  MatrixXr a = MatrixXr::Zero(1, 1), b = MatrixXr::Zero(1, 1);
  const MatrixXr g = MatrixXr::Ones(1, 1);
  AdamState<double> st;
  std::vector<MatrixXr*> ps{&a, &b};
  std::vector<const MatrixXr*> gs{&g, &g};
  std::vector<AdamHyper> hs(2);
  hs[0].lr = 0.01;
  hs[1].lr = 0.04;
  adam_step<double>(ps, gs, st, std::span<const AdamHyper>(hs));
  EXPECT_NEAR(a(0, 0) * 4, b(0, 0), 1e-15);
}

TEST(GradCheck, LinearSoftmaxToy) {
  MatrixXr x = random_matrix(5, 4, 1), w = random_matrix(4, 3, 2), b = random_matrix(1, 3, 3);
  const std::vector<int> y{0, 1, 2, 1, 0};
  const std::vector<Index> idx{0, 1, 2, 3, 4};
  auto loss = [&] { return softmax_xent_forward(linear_forward(x, w, b), y, idx).loss; };
  const auto r = softmax_xent_forward(linear_forward(x, w, b), y, idx);
  const auto lg = linear_backward(softmax_xent_backward<double>(r.probabilities, y, idx), x, w);
  const MatrixXr w0 = w;
  const std::vector<GradCheckTensor<double>> t{{"w", &w, &lg.weight}, {"b", &b, &lg.bias}, {"x", &x, &lg.input}};
  const auto rep = grad_check<double>(loss, t);
  EXPECT_LT(rep.max_rel_error(), 1e-6);
  EXPECT_EQ(rep.entries.size(), 3u);
  EXPECT_EQ(w, w0); // restored exactly
}

TEST(GradCheck, DetectsCorruptedBackward) {
  MatrixXr x = random_matrix(5, 4, 1), w = random_matrix(4, 3, 2), b = random_matrix(1, 3, 3);
  const std::vector<int> y{0, 1, 2, 1, 0};
  const std::vector<Index> idx{0, 1, 2, 3, 4};
  auto loss = [&] { return softmax_xent_forward(linear_forward(x, w, b), y, idx).loss; };
  const auto r = softmax_xent_forward(linear_forward(x, w, b), y, idx);
  auto lg = linear_backward(softmax_xent_backward<double>(r.probabilities, y, idx), x, w);
  lg.weight *= 1.5;
  const std::vector<GradCheckTensor<double>> t{{"w", &w, &lg.weight}};
  EXPECT_GT(grad_check<double>(loss, t).max_rel_error(), 1e-2);
}

TEST(Rng, CounterBasedDraws) {
  RngStream a(5), b(5);
  for (int i = 0; i < 10; ++i) a.next_u64();
  EXPECT_EQ(a.next_u64(), b.at(10));
  RngStream c(5, 10);
  RngStream d(5);
  d.discard(10);
  EXPECT_EQ(c.next_u64(), d.next_u64());
  EXPECT_NE(RngStream(1).next_u64(), RngStream(2).next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(a.below(7), 7u);
  }
}

TEST(Rng, KnownValues) {
  // first output of the reference splitmix64 generator seeded with 1234567
  std::uint64_t s = 1234567;
  std::uint64_t first = splitmix64(s);
  EXPECT_EQ(first, 6457827717110365317ull);
}
