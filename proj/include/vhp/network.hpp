// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "vhp/net_layers.hpp"

namespace vhp::net {

enum class Mode { training, inference };

// Everything backward() needs from the training-mode forward pass.
template <class S>
struct ForwardCache {
  int B = 0;
  LstmCache<S> fwd, bwd;
  Mat<S> concat;     // B x 2H
  Mat<S> drop_mask;  // B x 2H
  Mat<S> dropped;
  BnCache<S> bn;
  Mat<S> bn_out;
  Mat<S> a1;  // dense1 pre-activation
  Mat<S> r1;  // relu(a1)
  Mat<S> probs;
};

// BiLSTM(H per direction) -> Dropout -> BatchNorm -> Dense(ReLU) ->
// Dense(softmax). Forward passes are pure in the parameters; the batch-norm
// running-stat update is a separate explicit step.
template <class S>
class Network {
 public:
  explicit Network(ModelConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  const ModelConfig& config() const { return cfg_; }

  static constexpr S kBnEps = static_cast<S>(1e-3);
  static constexpr S kBnMomentum = static_cast<S>(0.99);

  // x: (B*L) x D, row t*B+i = timestep t of element i. The dropout mask is
  // drawn from `dropout_rng`, so identical seeds give identical passes.
  const Mat<S>& forward_train(const ModelParamsT<S>& p, const Mat<S>& x, int B,
                              Prng& dropout_rng, ForwardCache<S>& cache) const {
    cache.B = B;
    const Mat<S> hf = lstm_forward(x, B, cfg_.seq_len, p.fwd, TimeDirection::forward, &cache.fwd);
    const Mat<S> hb = lstm_forward(x, B, cfg_.seq_len, p.bwd, TimeDirection::backward, &cache.bwd);
    cache.concat.resize(B, cfg_.bn_width());
    cache.concat << hf, hb;

    cache.drop_mask = dropout_mask<S>(B, cfg_.bn_width(), cfg_.dropout_rate, dropout_rng);
    cache.dropped = cache.concat.array() * cache.drop_mask.array();

    cache.bn_out = batchnorm_train(cache.dropped, p.bn, kBnEps, cache.bn);
    cache.a1 = linear(cache.bn_out, p.dense1);
    cache.r1 = cache.a1.cwiseMax(S(0));
    cache.probs = softmax_rows(linear(cache.r1, p.out));
    return cache.probs;
  }

  // Inference: dropout is identity, batch norm uses running statistics.
  Mat<S> forward_infer(const ModelParamsT<S>& p, const Mat<S>& x, int B) const {
    const Mat<S> hf = lstm_forward<S>(x, B, cfg_.seq_len, p.fwd, TimeDirection::forward, nullptr);
    const Mat<S> hb = lstm_forward<S>(x, B, cfg_.seq_len, p.bwd, TimeDirection::backward, nullptr);
    Mat<S> concat(B, cfg_.bn_width());
    concat << hf, hb;
    const Mat<S> y = batchnorm_infer(concat, p.bn, kBnEps);
    const Mat<S> r1 = dense_forward(y, p.dense1, Activation::relu);
    return dense_forward(r1, p.out, Activation::softmax);
  }

  S loss(const Mat<S>& probs, const std::vector<int>& labels,
         const std::vector<S>& sample_weights) const {
    return weighted_nll(probs, labels, sample_weights);
  }

  // Analytic gradients for every trainable tensor, accumulated into `grads`
  // (zeroed by the caller); input gradients go to *dx when non-null.
  void backward(const ModelParamsT<S>& p, const Mat<S>& x, const ForwardCache<S>& cache,
                const std::vector<int>& labels, const std::vector<S>& sample_weights,
                ModelParamsT<S>& grads, Mat<S>* dx = nullptr) const {
    if (cache.probs.rows() == 0)
      throw ConfigError("backward: cache is missing a training-mode forward pass");
    const int B = cache.B;
    const int H = cfg_.hidden;

    Mat<S> dlogits = softmax_xent_backward(cache.probs, labels, sample_weights);

    grads.out.W.noalias() += cache.r1.transpose() * dlogits;
    grads.out.b += dlogits.colwise().sum().transpose();
    Mat<S> dr1 = dlogits * p.out.W.transpose();

    Mat<S> da1 = (cache.a1.array() > S(0)).template cast<S>() * dr1.array();
    grads.dense1.W.noalias() += cache.bn_out.transpose() * da1;
    grads.dense1.b += da1.colwise().sum().transpose();
    Mat<S> dbn_out = da1 * p.dense1.W.transpose();

    Mat<S> ddropped =
        batchnorm_backward(dbn_out, p.bn, cache.bn, grads.bn.gamma, grads.bn.beta);
    Mat<S> dconcat = ddropped.array() * cache.drop_mask.array();

    lstm_backward(x, B, cfg_.seq_len, p.fwd, TimeDirection::forward, cache.fwd,
                  Mat<S>(dconcat.leftCols(H)), grads.fwd, dx);
    lstm_backward(x, B, cfg_.seq_len, p.bwd, TimeDirection::backward, cache.bwd,
                  Mat<S>(dconcat.rightCols(H)), grads.bwd, dx);
  }

  void update_running_stats(ModelParamsT<S>& p, const ForwardCache<S>& cache) const {
    bn_update_running(p.bn, cache.bn, kBnMomentum);
  }

 private:
  ModelConfig cfg_;
};

}  // namespace vhp::net
