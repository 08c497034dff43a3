#pragma once

#include "fsgnn/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace fsgnn::nn {

template <typename Scalar>
struct GradCheckTensor {
  std::string name;
  Matrix<Scalar>* value = nullptr;
  const Matrix<Scalar>* analytic = nullptr;
};

struct GradCheckEntry {
  std::string name;
  /// ||analytic - numeric|| / (||analytic|| + ||numeric||), 0 when both vanish.
  double rel_error = 0;
  double max_abs_error = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  double max_rel_error() const {
    double m = 0;
    for (const auto& e : entries) m = std::max(m, e.rel_error);
    return m;
  }
};

/// Central differences of `loss` against the supplied analytic gradients.
/// Each perturbed entry is restored to its exact original value.
template <typename Scalar, typename LossFn>
GradCheckReport grad_check(LossFn&& loss, std::span<const GradCheckTensor<Scalar>> tensors,
                           Scalar h = Scalar(1e-5)) {
  GradCheckReport report;
  for (const auto& t : tensors) {
    require_shape(t.value && t.analytic && t.value->rows() == t.analytic->rows() &&
                      t.value->cols() == t.analytic->cols(),
                  "grad_check: tensor '" + t.name + "' shape mismatch");
    Matrix<Scalar> numeric(t.value->rows(), t.value->cols());
    Scalar* data = t.value->data();
    for (Index k = 0; k < t.value->size(); ++k) {
      const Scalar saved = data[k];
      data[k] = saved + h;
      const Scalar up = loss();
      data[k] = saved - h;
      const Scalar down = loss();
      data[k] = saved;
      numeric.data()[k] = (up - down) / (Scalar(2) * h);
    }
    const Scalar diff = (*t.analytic - numeric).norm();
    const Scalar denom = t.analytic->norm() + numeric.norm();
    GradCheckEntry e;
    e.name = t.name;
    e.rel_error = denom > Scalar(0) ? static_cast<double>(diff / denom) : 0.0;
    e.max_abs_error = static_cast<double>((*t.analytic - numeric).cwiseAbs().maxCoeff());
    report.entries.push_back(e);
  }
  return report;
}

} // namespace fsgnn::nn
