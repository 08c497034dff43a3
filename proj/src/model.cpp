#include "fsgnn/model.hpp"

#include "binary_io.hpp"

#include <array>
#include <cmath>
#include <fstream>

namespace fsgnn {

using nn::Aggregation;

std::string to_string(Aggregation a) { return a == Aggregation::concat ? "cat" : "sum"; }

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "cat" || s == "concat") return Aggregation::concat;
  if (s == "sum") return Aggregation::sum;
  throw InputError("unknown aggregation '" + s + "' (expected cat or sum)");
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.for_each_tensor([](const std::string&, ParamGroup, MatrixXr& t) { t.setZero(); });
  return z;
}

bool ModelParams::operator==(const ModelParams& o) const {
  if (!(variant == o.variant) || hidden != o.hidden || classes != o.classes ||
      w0.size() != o.w0.size() || b0.size() != o.b0.size())
    return false;
  auto same = [](const MatrixXr& a, const MatrixXr& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
  };
  for (std::size_t i = 0; i < w0.size(); ++i)
    if (!same(w0[i], o.w0[i]) || !same(b0[i], o.b0[i])) return false;
  return same(gamma, o.gamma) && same(w1, o.w1) && same(b1, o.b1);
}

namespace {

void fill_uniform(MatrixXr& m, double bound, RngStream& rng) {
  double* d = m.data();
  for (Index i = 0; i < m.size(); ++i) d[i] = rng.uniform(-bound, bound);
}

const MatrixXr& w0_for(const ModelParams& p, std::size_t l) {
  return p.variant.shared_w0 ? p.w0.front() : p.w0[l];
}
const MatrixXr& b0_for(const ModelParams& p, std::size_t l) {
  return p.variant.shared_w0 ? p.b0.front() : p.b0[l];
}

void check_compatible(const ModelParams& p, const HopFeatures& fs) {
  require_shape(fs.size() == p.num_branches(),
                "model has " + std::to_string(p.num_branches()) + " branches, features have " +
                    std::to_string(fs.size()));
  for (std::size_t l = 0; l < fs.size(); ++l)
    require_shape(fs[l].cols() == w0_for(p, l).rows(),
                  "branch " + std::to_string(l) + " feature width does not match W0");
}

/// Gathered (and, when training, dropped-out) input rows of one branch.
MatrixXr branch_input(const HopFeatures& fs, std::size_t l, std::span<const Index> rows,
                      const ForwardOptions& opts, RngStream& rng) {
  const MatrixXr& src = fs[l];
  MatrixXr x;
  if (rows.empty()) {
    x = src;
  } else {
    x.resize(static_cast<Index>(rows.size()), src.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require_shape(rows[i] >= 0 && rows[i] < src.rows(), "row index out of range");
      x.row(static_cast<Index>(i)) = src.row(rows[i]);
    }
  }
  if (opts.training) nn::dropout_inplace(x, opts.dropout, rng);
  return x;
}

struct ForwardCache {
  std::vector<MatrixXr> inputs;         // gathered, dropped-out branch inputs
  std::vector<MatrixXr> pre_norm;       // x W0 + b0
  std::vector<MatrixXr> normalized;     // after optional L2
  MatrixXr aggregated;
  MatrixXr hidden_mask;
  MatrixXr hidden;                      // after ReLU and dropout
  VectorXr alphas;
  VectorXr scales;
};

MatrixXr run_forward(const ModelParams& p, const HopFeatures& fs, std::span<const Index> rows,
                     const ForwardOptions& opts, RngStream& rng, ForwardCache* cache) {
  check_compatible(p, fs);
  if (opts.dropout < 0.0 || opts.dropout >= 1.0) throw InputError("dropout rate must be in [0, 1)");
  const std::size_t L = fs.size();
  const VectorXr alphas = get_alphas(p);
  const VectorXr scales = p.variant.soft_selection ? alphas : VectorXr::Ones(static_cast<Index>(L));

  std::vector<MatrixXr> branches(L);
  if (cache) {
    cache->inputs.assign(L, {});
    cache->pre_norm.assign(L, {});
    cache->normalized.assign(L, {});
  }
  for (std::size_t l = 0; l < L; ++l) {
    MatrixXr x = branch_input(fs, l, rows, opts, rng);
    MatrixXr z = nn::linear_forward(x, w0_for(p, l), b0_for(p, l));
    if (cache) cache->inputs[l] = std::move(x);
    require_finite(z, ("first linear layer, branch " + std::to_string(l)).c_str());
    MatrixXr n = p.variant.l2_norm ? nn::l2_row_normalize_forward(z) : z;
    branches[l] = scales(static_cast<Index>(l)) * n;
    if (cache) {
      cache->pre_norm[l] = std::move(z);
      cache->normalized[l] = std::move(n);
    }
  }

  MatrixXr agg = nn::aggregate_forward<double>(branches, p.variant.aggregation);
  MatrixXr h = p.variant.hidden_relu ? nn::relu_forward(agg) : agg;
  auto dropped = nn::dropout_forward(h, opts.dropout, rng, opts.training);
  MatrixXr logits = nn::linear_forward(dropped.output, p.w1, p.b1);
  require_finite(logits, "second linear layer (logits)");

  if (cache) {
    cache->aggregated = std::move(agg);
    cache->hidden_mask = std::move(dropped.mask);
    cache->hidden = std::move(dropped.output);
    cache->alphas = alphas;
    cache->scales = scales;
  }
  return logits;
}

} // namespace

ModelParams init_params(const HopFeatures& fs, Index hidden, Index classes,
                        const ModelVariant& variant, std::uint64_t seed) {
  if (hidden < 1) throw InputError("hidden width must be >= 1");
  if (classes < 2) throw InputError("need at least 2 classes");
  if (fs.empty()) throw InputError("model needs at least one feature branch");
  const std::size_t L = fs.size();
  if (variant.shared_w0) {
    for (std::size_t l = 1; l < L; ++l)
      if (fs[l].cols() != fs[0].cols())
        throw InputError("shared W0 requires equal feature widths across branches");
  }

  RngStream rng(seed);
  ModelParams p;
  p.variant = variant;
  p.hidden = hidden;
  p.classes = classes;
  const std::size_t n_w0 = variant.shared_w0 ? 1 : L;
  for (std::size_t l = 0; l < n_w0; ++l) {
    MatrixXr w(fs[l].cols(), hidden);
    fill_uniform(w, 1.0 / std::sqrt(static_cast<double>(fs[l].cols())), rng);
    p.w0.push_back(std::move(w));
    p.b0.push_back(MatrixXr::Zero(1, hidden));
  }
  p.gamma = MatrixXr::Ones(static_cast<Index>(L), 1);
  const Index fan_in = variant.aggregation == Aggregation::concat ? static_cast<Index>(L) * hidden : hidden;
  p.w1.resize(fan_in, classes);
  fill_uniform(p.w1, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
  p.b1 = MatrixXr::Zero(1, classes);
  return p;
}

VectorXr get_alphas(const ModelParams& p) {
  return nn::softmax_forward<double>(p.gamma.col(0));
}

VectorXr branch_scales(const ModelParams& p) {
  return p.variant.soft_selection ? get_alphas(p) : VectorXr::Ones(p.gamma.rows());
}

MatrixXr forward(const ModelParams& p, const HopFeatures& fs, const ForwardOptions& opts,
                 RngStream& rng, std::span<const Index> rows) {
  return run_forward(p, fs, rows, opts, rng, nullptr);
}

LossAndGrads loss_and_grads(const ModelParams& p, const HopFeatures& fs, std::span<const int> labels,
                            std::span<const Index> train_idx, const ForwardOptions& opts,
                            RngStream& rng) {
  if (train_idx.empty()) throw InputError("loss: empty training index set");
  require_shape(static_cast<Index>(labels.size()) == fs.rows(), "loss: label count != node count");

  ForwardCache cache;
  const MatrixXr logits = run_forward(p, fs, train_idx, opts, rng, &cache);
  std::vector<int> local_labels(train_idx.size());
  std::vector<Index> local_idx(train_idx.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    local_labels[i] = labels[static_cast<std::size_t>(train_idx[i])];
    local_idx[i] = static_cast<Index>(i);
  }
  const auto xent = nn::softmax_xent_forward<double>(logits, local_labels, local_idx);
  if (!std::isfinite(xent.loss)) throw NumericError("non-finite training loss");
  const MatrixXr d_logits = nn::softmax_xent_backward<double>(xent.probabilities, local_labels, local_idx);

  LossAndGrads out;
  out.loss = xent.loss;
  out.grads = p.zeros_like();
  ModelParams& g = out.grads;

  auto lin2 = nn::linear_backward(d_logits, cache.hidden, p.w1);
  g.w1 = std::move(lin2.weight);
  g.b1 = std::move(lin2.bias);
  MatrixXr d_hidden = nn::dropout_backward(lin2.input, cache.hidden_mask);
  if (p.variant.hidden_relu) d_hidden = nn::relu_backward(d_hidden, cache.aggregated);

  const std::size_t L = fs.size();
  std::vector<Index> widths(L, p.hidden);
  const auto d_branches = nn::aggregate_backward<double>(d_hidden, widths, p.variant.aggregation);

  VectorXr d_alpha = VectorXr::Zero(static_cast<Index>(L));
  for (std::size_t l = 0; l < L; ++l) {
    const MatrixXr& d_scaled = d_branches[l];
    if (p.variant.soft_selection)
      d_alpha(static_cast<Index>(l)) = d_scaled.cwiseProduct(cache.normalized[l]).sum();
    MatrixXr d_z = cache.scales(static_cast<Index>(l)) * d_scaled;
    if (p.variant.l2_norm) d_z = nn::l2_row_normalize_backward(d_z, cache.pre_norm[l]);

    auto lin1 = nn::linear_backward(d_z, cache.inputs[l], w0_for(p, l), false);
    const std::size_t slot = p.variant.shared_w0 ? 0 : l;
    g.w0[slot] += lin1.weight;
    g.b0[slot] += lin1.bias;
  }
  if (p.variant.soft_selection) g.gamma.col(0) = nn::softmax_backward<double>(d_alpha, cache.alphas);

  g.for_each_tensor([](const std::string& name, ParamGroup, const MatrixXr& t) {
    require_finite(t, ("gradient " + name).c_str());
  });
  return out;
}

std::vector<int> predict(const MatrixXr& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Index r = 0; r < logits.rows(); ++r) {
    Index best = 0;
    for (Index c = 1; c < logits.cols(); ++c)
      if (logits(r, c) > logits(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

namespace {
constexpr std::array<char, 8> kCkptMagic = {'F', 'S', 'G', 'N', 'N', 'P', 'R', 'M'};
constexpr std::uint32_t kCkptVersion = 1;
} // namespace

void save_checkpoint(const ModelParams& p, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write checkpoint " + path.string());
  detail::BinaryWriter out(os);
  out.bytes(kCkptMagic.data(), kCkptMagic.size());
  out.value<std::uint32_t>(kCkptVersion);
  const std::uint32_t flags = (p.variant.soft_selection ? 1u : 0u) | (p.variant.shared_w0 ? 2u : 0u) |
                              (p.variant.l2_norm ? 4u : 0u) | (p.variant.hidden_relu ? 8u : 0u) |
                              (p.variant.aggregation == Aggregation::sum ? 16u : 0u);
  out.value<std::uint32_t>(flags);
  out.value<std::uint64_t>(static_cast<std::uint64_t>(p.hidden));
  out.value<std::uint64_t>(static_cast<std::uint64_t>(p.classes));
  out.value<std::uint32_t>(static_cast<std::uint32_t>(p.w0.size()));
  std::uint32_t count = 0;
  p.for_each_tensor([&](const std::string&, ParamGroup, const MatrixXr&) { ++count; });
  out.value<std::uint32_t>(count);
  p.for_each_tensor([&](const std::string& name, ParamGroup, const MatrixXr& t) {
    out.string(name);
    out.matrix(t);
  });
  out.finish();
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open checkpoint " + path.string());
  detail::BinaryReader in(is, "checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.bytes(magic.data(), magic.size());
  if (magic != kCkptMagic) in.fail("not a parameter checkpoint");
  if (in.value<std::uint32_t>() != kCkptVersion) in.fail("unsupported version");
  const auto flags = in.value<std::uint32_t>();
  ModelParams p;
  p.variant.soft_selection = flags & 1u;
  p.variant.shared_w0 = flags & 2u;
  p.variant.l2_norm = flags & 4u;
  p.variant.hidden_relu = flags & 8u;
  p.variant.aggregation = (flags & 16u) ? Aggregation::sum : Aggregation::concat;
  p.hidden = static_cast<Index>(in.value<std::uint64_t>());
  p.classes = static_cast<Index>(in.value<std::uint64_t>());
  const auto n_w0 = in.value<std::uint32_t>();
  if (n_w0 == 0 || n_w0 > 4096) in.fail("bad branch count");
  p.w0.resize(n_w0);
  p.b0.resize(n_w0);
  const auto count = in.value<std::uint32_t>();
  std::uint32_t expected = 0;
  p.for_each_tensor([&](const std::string&, ParamGroup, MatrixXr&) { ++expected; });
  if (count != expected) in.fail("tensor count mismatch");
  p.for_each_tensor([&](const std::string& name, ParamGroup, MatrixXr& t) {
    if (in.string() != name) in.fail("unexpected tensor name, wanted " + name);
    t = in.matrix();
  });
  in.finish();
  return p;
}

} // namespace fsgnn
