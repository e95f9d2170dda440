// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "vhp/net_params.hpp"

namespace vhp::net {

// Adam with bias correction. Only the trainable tensors have moment slots;
// batch-norm running statistics are never touched by the optimizer.
template <class S>
struct AdamState {
  ModelParamsT<S> m, v;
  long long t = 0;
  S lr = static_cast<S>(1e-3);
  S beta1 = static_cast<S>(0.9);
  S beta2 = static_cast<S>(0.999);
  S epsilon = static_cast<S>(1e-7);
};

template <class S>
AdamState<S> init_adam(const ModelConfig& cfg) {
  AdamState<S> st;
  st.m = zeros_like_params<S>(cfg);
  st.v = zeros_like_params<S>(cfg);
  return st;
}

template <class S>
void adam_step(ModelParamsT<S>& params, const ModelParamsT<S>& grads, AdamState<S>& st) {
  st.t += 1;
  const S bc1 = S(1) - static_cast<S>(std::pow(static_cast<double>(st.beta1), st.t));
  const S bc2 = S(1) - static_cast<S>(std::pow(static_cast<double>(st.beta2), st.t));

  std::vector<TensorRef<S>> ps, gs, ms, vs;
  visit_trainable(params, [&](TensorRef<S> r) { ps.push_back(r); });
  visit_trainable(const_cast<ModelParamsT<S>&>(grads), [&](TensorRef<S> r) { gs.push_back(r); });
  visit_trainable(st.m, [&](TensorRef<S> r) { ms.push_back(r); });
  visit_trainable(st.v, [&](TensorRef<S> r) { vs.push_back(r); });

  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (gs[k].size != ps[k].size) throw ConfigError("adam_step: gradient shape mismatch");
    S* p = ps[k].data;
    const S* g = gs[k].data;
    S* m = ms[k].data;
    S* v = vs[k].data;
    for (Eigen::Index i = 0; i < ps[k].size; ++i) {
      m[i] = st.beta1 * m[i] + (S(1) - st.beta1) * g[i];
      v[i] = st.beta2 * v[i] + (S(1) - st.beta2) * g[i] * g[i];
      p[i] -= st.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + st.epsilon);
    }
  }
}

}  // namespace vhp::net
