#pragma once

#include "fsgnn/types.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace fsgnn::nn {

struct AdamHyper {
  double lr = 0.01;
  /// Classic L2: grad += weight_decay * param before the moment update.
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename Scalar>
struct AdamState {
  std::vector<Matrix<Scalar>> first;
  std::vector<Matrix<Scalar>> second;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update; `hyper[i]` applies to tensor i. State is
/// zero-initialized on first use.
template <typename Scalar>
void adam_step(std::span<Matrix<Scalar>* const> params, std::span<const Matrix<Scalar>* const> grads,
               AdamState<Scalar>& state, std::span<const AdamHyper> hyper) {
  require_shape(params.size() == grads.size() && params.size() == hyper.size(),
                "adam: params/grads/hyper count mismatch");
  if (state.first.empty()) {
    for (auto* p : params) {
      state.first.push_back(Matrix<Scalar>::Zero(p->rows(), p->cols()));
      state.second.push_back(Matrix<Scalar>::Zero(p->rows(), p->cols()));
    }
  }
  require_shape(state.first.size() == params.size(), "adam: state size mismatch");
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix<Scalar>& p = *params[i];
    const Matrix<Scalar>& g0 = *grads[i];
    const AdamHyper& h = hyper[i];
    require_shape(g0.rows() == p.rows() && g0.cols() == p.cols() &&
                      state.first[i].rows() == p.rows() && state.first[i].cols() == p.cols(),
                  "adam: tensor shape mismatch");
    const Scalar b1 = Scalar(h.beta1), b2 = Scalar(h.beta2);
    const Scalar bc1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
    const Scalar bc2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
    const Scalar step_size = Scalar(h.lr) / bc1;
    const Scalar sqrt_bc2 = std::sqrt(bc2);

    auto& m = state.first[i];
    auto& v = state.second[i];
    const Index n = p.size();
    Scalar* pd = p.data();
    const Scalar* gd = g0.data();
    Scalar* md = m.data();
    Scalar* vd = v.data();
    for (Index k = 0; k < n; ++k) {
      const Scalar g = gd[k] + Scalar(h.weight_decay) * pd[k];
      md[k] = b1 * md[k] + (Scalar(1) - b1) * g;
      vd[k] = b2 * vd[k] + (Scalar(1) - b2) * g * g;
      const Scalar denom = std::sqrt(vd[k]) / sqrt_bc2 + Scalar(h.eps);
      pd[k] -= step_size * md[k] / denom;
    }
  }
}

template <typename Scalar>
void adam_step(std::span<Matrix<Scalar>* const> params, std::span<const Matrix<Scalar>* const> grads,
               AdamState<Scalar>& state, const AdamHyper& hyper) {
  const std::vector<AdamHyper> per(params.size(), hyper);
  adam_step<Scalar>(params, grads, state, std::span<const AdamHyper>(per));
}

} // namespace fsgnn::nn
