#pragma once

#include "fsgnn/graph.hpp"
#include "fsgnn/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fsgnn {

enum class LoopMode { none, self_loop };

/// Compressed sparse row matrix.
template <typename Scalar>
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> row_offsets{0};
  std::vector<Index> col_indices;
  std::vector<Scalar> values;

  Index nonzeros() const noexcept { return static_cast<Index>(values.size()); }

  static CsrMatrix identity(Index n) {
    CsrMatrix m;
    m.rows = m.cols = n;
    m.row_offsets.resize(n + 1);
    m.col_indices.resize(n);
    m.values.assign(n, Scalar(1));
    for (Index i = 0; i <= n; ++i) m.row_offsets[i] = i;
    for (Index i = 0; i < n; ++i) m.col_indices[i] = i;
    return m;
  }

  /// Throws ShapeError if any CSR invariant is broken.
  void validate() const {
    require_shape(static_cast<Index>(row_offsets.size()) == rows + 1, "csr: row_offsets length");
    require_shape(row_offsets.front() == 0 && row_offsets.back() == nonzeros(),
                  "csr: row_offsets bounds");
    require_shape(col_indices.size() == values.size(), "csr: index/value length");
    for (Index r = 0; r < rows; ++r) {
      require_shape(row_offsets[r] <= row_offsets[r + 1], "csr: row_offsets not monotone");
      for (Index k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
        require_shape(col_indices[k] >= 0 && col_indices[k] < cols, "csr: column out of range");
        require_shape(k == row_offsets[r] || col_indices[k - 1] < col_indices[k],
                      "csr: columns not strictly increasing");
        require_shape(std::isfinite(values[k]), "csr: non-finite value");
      }
    }
  }

  Matrix<Scalar> to_dense() const {
    Matrix<Scalar> d = Matrix<Scalar>::Zero(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index k = row_offsets[r]; k < row_offsets[r + 1]; ++k) d(r, col_indices[k]) = values[k];
    return d;
  }
};

/// D^{-1/2} A D^{-1/2} (LoopMode::none) or the same with A + I and its degree
/// matrix (LoopMode::self_loop). Rows of degree-0 nodes are all zero.
template <typename Scalar = double>
CsrMatrix<Scalar> sym_normalize(const Graph& g, LoopMode loops) {
  const Index n = g.num_nodes();
  const bool self = loops == LoopMode::self_loop;
  std::vector<Index> deg(n);
  for (Index u = 0; u < n; ++u) deg[u] = g.degree(u) + (self ? 1 : 0);
  // 1/sqrt(d_u d_v) from the integer product keeps regular rows exact.
  auto entry = [&](Index u, Index v) {
    const Index p = deg[u] * deg[v];
    return p > 0 ? Scalar(1) / std::sqrt(static_cast<Scalar>(p)) : Scalar(0);
  };
  CsrMatrix<Scalar> m;
  m.rows = m.cols = n;
  m.row_offsets.resize(n + 1);
  m.col_indices.reserve(g.col_indices().size() + (self ? n : 0));
  m.values.reserve(m.col_indices.capacity());
  m.row_offsets[0] = 0;
  for (Index u = 0; u < n; ++u) {
    bool diag_done = !self;
    for (Index v : g.neighbors(u)) {
      if (!diag_done && v > u) {
        m.col_indices.push_back(u);
        m.values.push_back(entry(u, u));
        diag_done = true;
      }
      m.col_indices.push_back(v);
      m.values.push_back(entry(u, v));
    }
    if (!diag_done) {
      m.col_indices.push_back(u);
      m.values.push_back(entry(u, u));
    }
    m.row_offsets[u + 1] = static_cast<Index>(m.col_indices.size());
  }
  return m;
}

/// Sparse times dense. Each output row is accumulated sequentially in CSR
/// order, so the result does not depend on how rows are scheduled.
template <typename Scalar, typename Derived>
Matrix<Scalar> spmm(const CsrMatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  require_shape(a.cols == x.rows(), "spmm: lhs cols " + std::to_string(a.cols) +
                                        " != rhs rows " + std::to_string(x.rows()));
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.rows, x.cols());
  for (Index r = 0; r < a.rows; ++r) {
    auto row = out.row(r);
    for (Index k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      row.noalias() += a.values[k] * x.row(a.col_indices[k]);
    }
  }
  return out;
}

} // namespace fsgnn
