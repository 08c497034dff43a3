#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fsgnn {

using Index = Eigen::Index;

// Row-major throughout: every per-node operation (normalization, softmax,
// dropout masks) walks contiguous rows.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXr = Matrix<double>;
using VectorXr = Vector<double>;
using RowVectorXr = RowVector<double>;

/// Malformed input: bad files, out-of-range ids, invalid flags.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not line up.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN/Inf appeared inside the numerical pipeline.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite value in ") + where);
  }
}

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

} // namespace fsgnn
