#pragma once

// Forward/backward pairs for the fixed FSGNN layer set. Every backward takes
// the upstream gradient plus whatever the forward needs to be replayed, and
// returns exact gradients; there is no tape.

#include "fsgnn/rng.hpp"
#include "fsgnn/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace fsgnn::nn {

enum class Aggregation { concat, sum };

template <typename Scalar>
struct LinearGrads {
  Matrix<Scalar> input;
  Matrix<Scalar> weight;
  Matrix<Scalar> bias; // 1 x out
};

/// x W + b, with `bias` a 1 x out row broadcast over rows.
template <typename Scalar>
Matrix<Scalar> linear_forward(const Matrix<Scalar>& x, const Matrix<Scalar>& weight,
                              const Matrix<Scalar>& bias) {
  require_shape(x.cols() == weight.rows(), "linear: input cols " + std::to_string(x.cols()) +
                                               " != weight rows " + std::to_string(weight.rows()));
  require_shape(bias.rows() == 1 && bias.cols() == weight.cols(), "linear: bias shape");
  Matrix<Scalar> out(x.rows(), weight.cols());
  out.noalias() = x * weight;
  out.rowwise() += bias.row(0);
  return out;
}

template <typename Scalar>
LinearGrads<Scalar> linear_backward(const Matrix<Scalar>& grad_out, const Matrix<Scalar>& x,
                                    const Matrix<Scalar>& weight, bool need_input_grad = true) {
  require_shape(grad_out.rows() == x.rows() && grad_out.cols() == weight.cols() &&
                    x.cols() == weight.rows(),
                "linear backward: shape mismatch");
  LinearGrads<Scalar> g;
  g.weight.noalias() = x.transpose() * grad_out;
  g.bias = grad_out.colwise().sum();
  if (need_input_grad) g.input.noalias() = grad_out * weight.transpose();
  return g;
}

template <typename Scalar>
Matrix<Scalar> relu_forward(const Matrix<Scalar>& x) {
  return x.cwiseMax(Scalar(0));
}

/// Gradient is passed only where the forward input was strictly positive.
template <typename Scalar>
Matrix<Scalar> relu_backward(const Matrix<Scalar>& grad_out, const Matrix<Scalar>& input) {
  require_shape(grad_out.rows() == input.rows() && grad_out.cols() == input.cols(),
                "relu backward: shape mismatch");
  return (input.array() > Scalar(0)).select(grad_out, Scalar(0));
}

template <typename Scalar>
struct DropoutResult {
  Matrix<Scalar> output;
  /// Per-entry multiplier (0 or 1/(1-p)); empty when dropout was the identity.
  Matrix<Scalar> mask;
};

/// Inverted dropout. Entries are visited in row-major order, one draw each,
/// so a given RngStream state always produces the same mask.
template <typename Scalar>
void dropout_inplace(Matrix<Scalar>& x, double rate, RngStream& rng) {
  if (rate < 0.0 || rate >= 1.0) throw InputError("dropout rate must be in [0, 1)");
  if (rate == 0.0) return;
  const Scalar keep_scale = Scalar(1) / Scalar(1.0 - rate);
  Scalar* data = x.data();
  const Index n = x.size();
  const std::uint64_t base = rng.counter();
  rng.discard(static_cast<std::uint64_t>(n));
  // to_unit(bits) < rate  <=>  (bits >> 11) < ceil(rate * 2^53)
  const auto threshold = static_cast<std::uint64_t>(std::ceil(rate * 0x1.0p53));
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t k = rng.at(base + static_cast<std::uint64_t>(i)) >> 11;
    const Scalar factor = k < threshold ? Scalar(0) : keep_scale;
    data[i] *= factor;
  }
}

template <typename Scalar>
DropoutResult<Scalar> dropout_forward(const Matrix<Scalar>& x, double rate, RngStream& rng,
                                      bool training) {
  if (rate < 0.0 || rate >= 1.0) throw InputError("dropout rate must be in [0, 1)");
  DropoutResult<Scalar> r;
  if (!training || rate == 0.0) {
    r.output = x;
    return r;
  }
  r.mask = Matrix<Scalar>::Ones(x.rows(), x.cols());
  dropout_inplace(r.mask, rate, rng);
  r.output = x.cwiseProduct(r.mask);
  return r;
}

template <typename Scalar>
Matrix<Scalar> dropout_backward(const Matrix<Scalar>& grad_out, const Matrix<Scalar>& mask) {
  if (mask.size() == 0) return grad_out;
  return grad_out.cwiseProduct(mask);
}

inline constexpr double kL2Epsilon = 1e-12;

/// Each row divided by max(||row||_2, eps).
template <typename Scalar>
Matrix<Scalar> l2_row_normalize_forward(const Matrix<Scalar>& x, Scalar eps = Scalar(kL2Epsilon)) {
  Matrix<Scalar> out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) out.row(r) = x.row(r) / std::max(x.row(r).norm(), eps);
  return out;
}

/// Row Jacobian I/||x|| - x x^T/||x||^3 applied to the upstream gradient.
template <typename Scalar>
Matrix<Scalar> l2_row_normalize_backward(const Matrix<Scalar>& grad_out, const Matrix<Scalar>& x,
                                         Scalar eps = Scalar(kL2Epsilon)) {
  require_shape(grad_out.rows() == x.rows() && grad_out.cols() == x.cols(),
                "l2 normalize backward: shape mismatch");
  Matrix<Scalar> dx(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const Scalar norm = x.row(r).norm();
    if (norm > eps) {
      const auto y = x.row(r) / norm;
      dx.row(r) = (grad_out.row(r) - y * y.dot(grad_out.row(r))) / norm;
    } else {
      dx.row(r) = grad_out.row(r) / eps;
    }
  }
  return dx;
}

template <typename Scalar>
Vector<Scalar> softmax_forward(const Vector<Scalar>& logits) {
  require_shape(logits.size() >= 1, "softmax: empty input");
  const Scalar m = logits.maxCoeff();
  Vector<Scalar> e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

template <typename Scalar>
Vector<Scalar> softmax_backward(const Vector<Scalar>& grad_out, const Vector<Scalar>& output) {
  require_shape(grad_out.size() == output.size(), "softmax backward: size mismatch");
  const Scalar inner = output.dot(grad_out);
  return output.cwiseProduct((grad_out.array() - inner).matrix());
}

template <typename Scalar>
Matrix<Scalar> aggregate_forward(std::span<const Matrix<Scalar>> branches, Aggregation scheme) {
  require_shape(!branches.empty(), "aggregate: no branches");
  const Index rows = branches.front().rows();
  if (scheme == Aggregation::sum) {
    Matrix<Scalar> out = branches.front();
    for (std::size_t l = 1; l < branches.size(); ++l) {
      require_shape(branches[l].rows() == rows && branches[l].cols() == out.cols(),
                    "aggregate sum: branch shapes differ");
      out += branches[l];
    }
    return out;
  }
  Index cols = 0;
  for (const auto& b : branches) {
    require_shape(b.rows() == rows, "aggregate concat: row counts differ");
    cols += b.cols();
  }
  Matrix<Scalar> out(rows, cols);
  Index offset = 0;
  for (const auto& b : branches) {
    out.middleCols(offset, b.cols()) = b;
    offset += b.cols();
  }
  return out;
}

/// Splits (concat) or broadcasts (sum) the upstream gradient per branch.
template <typename Scalar>
std::vector<Matrix<Scalar>> aggregate_backward(const Matrix<Scalar>& grad_out,
                                               std::span<const Index> branch_cols,
                                               Aggregation scheme) {
  std::vector<Matrix<Scalar>> grads;
  grads.reserve(branch_cols.size());
  if (scheme == Aggregation::sum) {
    for (Index c : branch_cols) {
      require_shape(c == grad_out.cols(), "aggregate sum backward: width mismatch");
      grads.push_back(grad_out);
    }
    return grads;
  }
  Index offset = 0;
  for (Index c : branch_cols) {
    require_shape(offset + c <= grad_out.cols(), "aggregate concat backward: width mismatch");
    grads.emplace_back(grad_out.middleCols(offset, c));
    offset += c;
  }
  require_shape(offset == grad_out.cols(), "aggregate concat backward: width mismatch");
  return grads;
}

template <typename Scalar>
struct XentResult {
  Scalar loss = 0;
  Matrix<Scalar> probabilities; // row-wise softmax of every logits row
};

/// Mean negative log-likelihood over `index`, via log-sum-exp.
template <typename Scalar>
XentResult<Scalar> softmax_xent_forward(const Matrix<Scalar>& logits, std::span<const int> labels,
                                        std::span<const Index> index) {
  if (index.empty()) throw InputError("cross-entropy: empty index set");
  require_shape(static_cast<Index>(labels.size()) == logits.rows(), "cross-entropy: label count");
  XentResult<Scalar> r;
  r.probabilities.resize(logits.rows(), logits.cols());
  std::vector<Scalar> log_norm(static_cast<std::size_t>(logits.rows()));
  for (Index i = 0; i < logits.rows(); ++i) {
    const Scalar m = logits.row(i).maxCoeff();
    const auto shifted = (logits.row(i).array() - m).exp();
    const Scalar s = shifted.sum();
    r.probabilities.row(i) = shifted / s;
    log_norm[static_cast<std::size_t>(i)] = m + std::log(s);
  }
  Scalar total = 0;
  for (Index i : index) {
    require_shape(i >= 0 && i < logits.rows(), "cross-entropy: index out of range");
    const int y = labels[static_cast<std::size_t>(i)];
    require_shape(y >= 0 && y < logits.cols(), "cross-entropy: label out of range");
    total += log_norm[static_cast<std::size_t>(i)] - logits(i, y);
  }
  r.loss = total / static_cast<Scalar>(index.size());
  return r;
}

/// (softmax - onehot) / |index| on indexed rows, zero elsewhere.
template <typename Scalar>
Matrix<Scalar> softmax_xent_backward(const Matrix<Scalar>& probabilities,
                                     std::span<const int> labels, std::span<const Index> index) {
  if (index.empty()) throw InputError("cross-entropy: empty index set");
  Matrix<Scalar> grad = Matrix<Scalar>::Zero(probabilities.rows(), probabilities.cols());
  const Scalar scale = Scalar(1) / static_cast<Scalar>(index.size());
  for (Index i : index) {
    grad.row(i) += probabilities.row(i) * scale;
    grad(i, labels[static_cast<std::size_t>(i)]) -= scale;
  }
  return grad;
}

} // namespace fsgnn::nn
