// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "vhp/net_config.hpp"
#include "vhp/prng.hpp"

namespace vhp::net {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

// One LSTM direction. Gate columns are packed i, f, g, o: block k of width H
// holds gate k. The packing order is declared in the checkpoint header.
template <class S>
struct LstmDir {
  Mat<S> Wx;  // input kernel, D x 4H
  Mat<S> Wh;  // recurrent kernel, H x 4H
  Vec<S> b;   // 4H
};

template <class S>
struct BatchNormParams {
  Vec<S> gamma, beta;                 // trainable
  Vec<S> running_mean, running_var;   // non-trainable
};

template <class S>
struct DenseParams {
  Mat<S> W;  // in x out
  Vec<S> b;  // out
};

template <class S>
struct ModelParamsT {
  LstmDir<S> fwd, bwd;
  BatchNormParams<S> bn;
  DenseParams<S> dense1, out;
};

using ModelParams = ModelParamsT<float>;

// Flat view of one tensor for visitors (Eigen storage is contiguous,
// column-major).
template <class S>
struct TensorRef {
  const char* name;
  S* data;
  Eigen::Index size;
  Eigen::Index rows, cols;
};

// Fixed traversal order of the trainable tensors; this order is the
// checkpoint layout and the Adam slot order.
template <class S, class F>
void visit_trainable(ModelParamsT<S>& p, F&& f) {
  auto visit = [&](const char* name, auto& m) {
    f(TensorRef<S>{name, m.data(), m.size(), m.rows(), m.cols()});
  };
  visit("fwd.Wx", p.fwd.Wx);
  visit("fwd.Wh", p.fwd.Wh);
  visit("fwd.b", p.fwd.b);
  visit("bwd.Wx", p.bwd.Wx);
  visit("bwd.Wh", p.bwd.Wh);
  visit("bwd.b", p.bwd.b);
  visit("bn.gamma", p.bn.gamma);
  visit("bn.beta", p.bn.beta);
  visit("dense1.W", p.dense1.W);
  visit("dense1.b", p.dense1.b);
  visit("out.W", p.out.W);
  visit("out.b", p.out.b);
}

// Trainables plus batch-norm running stats; full checkpoint layout.
template <class S, class F>
void visit_all(ModelParamsT<S>& p, F&& f) {
  auto visit = [&](const char* name, auto& m) {
    f(TensorRef<S>{name, m.data(), m.size(), m.rows(), m.cols()});
  };
  visit("fwd.Wx", p.fwd.Wx);
  visit("fwd.Wh", p.fwd.Wh);
  visit("fwd.b", p.fwd.b);
  visit("bwd.Wx", p.bwd.Wx);
  visit("bwd.Wh", p.bwd.Wh);
  visit("bwd.b", p.bwd.b);
  visit("bn.gamma", p.bn.gamma);
  visit("bn.beta", p.bn.beta);
  visit("bn.running_mean", p.bn.running_mean);
  visit("bn.running_var", p.bn.running_var);
  visit("dense1.W", p.dense1.W);
  visit("dense1.b", p.dense1.b);
  visit("out.W", p.out.W);
  visit("out.b", p.out.b);
}

template <class S>
ModelParamsT<S> zeros_like_params(const ModelConfig& c) {
  const int D = c.input_dim, H = c.hidden, U = c.dense_units, C = c.num_classes;
  const int W = c.bn_width();
  ModelParamsT<S> p;
  for (LstmDir<S>* dir : {&p.fwd, &p.bwd}) {
    dir->Wx = Mat<S>::Zero(D, 4 * H);
    dir->Wh = Mat<S>::Zero(H, 4 * H);
    dir->b = Vec<S>::Zero(4 * H);
  }
  p.bn.gamma = Vec<S>::Zero(W);
  p.bn.beta = Vec<S>::Zero(W);
  p.bn.running_mean = Vec<S>::Zero(W);
  p.bn.running_var = Vec<S>::Zero(W);
  p.dense1.W = Mat<S>::Zero(W, U);
  p.dense1.b = Vec<S>::Zero(U);
  p.out.W = Mat<S>::Zero(U, C);
  p.out.b = Vec<S>::Zero(C);
  return p;
}

// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases except
// the forget-gate slice (set to 1), identity batch norm. Matrices are filled
// in visit_all order, elementwise in storage order, from one child stream of
// the seed, so initialization is bit-reproducible.
template <class S>
ModelParamsT<S> init_params(const ModelConfig& c, std::uint64_t seed) {
  c.validate();
  ModelParamsT<S> p = zeros_like_params<S>(c);
  Prng rng = Prng(seed).child(stream::kInit);

  auto glorot = [&](Mat<S>& m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = static_cast<S>((2.0 * rng.uniform() - 1.0) * limit);
  };
  for (LstmDir<S>* dir : {&p.fwd, &p.bwd}) {
    glorot(dir->Wx);
    glorot(dir->Wh);
    dir->b.segment(c.hidden, c.hidden).setOnes();  // forget gate
  }
  p.bn.gamma.setOnes();
  p.bn.running_var.setOnes();
  glorot(p.dense1.W);
  glorot(p.out.W);
  return p;
}

}  // namespace vhp::net
