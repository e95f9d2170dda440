// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "vhp/net_params.hpp"
#include "vhp/prng.hpp"

namespace vhp::net {

// Input layout everywhere: x has B*L rows and D columns, row t*B + i holds
// timestep t (original sequence order) of batch element i.

enum class TimeDirection { forward, backward };

// Per-step values kept for backprop. Blocks of B rows are indexed by
// consumption step s; h keeps L+1 blocks with block 0 = initial state.
template <class S>
struct LstmCache {
  Mat<S> acts;    // (B*L) x 4H activated gates i,f,g,o per step
  Mat<S> c;       // (B*L) x H cell states per step
  Mat<S> tanh_c;  // (B*L) x H
  Mat<S> h;       // (B*(L+1)) x H hidden states, block s+1 = after step s
};

namespace detail {
template <class S>
inline void activate_gates(Mat<S>& z, int H) {
  z.leftCols(2 * H) = (-z.leftCols(2 * H).array()).exp() + S(1);
  z.leftCols(2 * H) = z.leftCols(2 * H).array().inverse();  // sigmoid for i, f
  z.middleCols(2 * H, H) = z.middleCols(2 * H, H).array().tanh();
  z.rightCols(H) = (-z.rightCols(H).array()).exp() + S(1);
  z.rightCols(H) = z.rightCols(H).array().inverse();  // sigmoid for o
}
}  // namespace detail

// Standard LSTM recurrence over the whole sequence; returns the hidden state
// after the last consumed step (B x H). The backward direction consumes the
// time-reversed sequence.
template <class S>
Mat<S> lstm_forward(const Mat<S>& x, int B, int L, const LstmDir<S>& p,
                    TimeDirection dir, LstmCache<S>* cache) {
  const int H = static_cast<int>(p.Wh.rows());
  if (x.rows() != static_cast<Eigen::Index>(B) * L || x.cols() != p.Wx.rows())
    throw ConfigError("lstm_forward: input shape does not match parameters");

  Mat<S> xproj = x * p.Wx;  // one GEMM for all timesteps
  xproj.rowwise() += p.b.transpose();

  if (cache) {
    cache->acts.resize(static_cast<Eigen::Index>(B) * L, 4 * H);
    cache->c.resize(static_cast<Eigen::Index>(B) * L, H);
    cache->tanh_c.resize(static_cast<Eigen::Index>(B) * L, H);
    cache->h.resize(static_cast<Eigen::Index>(B) * (L + 1), H);
    cache->h.topRows(B).setZero();
  }

  Mat<S> h_prev = Mat<S>::Zero(B, H);
  Mat<S> c_prev = Mat<S>::Zero(B, H);
  Mat<S> z(B, 4 * H), c_cur(B, H), tanh_cur(B, H), h_cur(B, H);

  for (int s = 0; s < L; ++s) {
    const int t = dir == TimeDirection::forward ? s : L - 1 - s;
    z = xproj.middleRows(static_cast<Eigen::Index>(t) * B, B);
    z.noalias() += h_prev * p.Wh;
    detail::activate_gates(z, H);

    c_cur = z.middleCols(H, H).array() * c_prev.array() +        // f . c_prev
            z.leftCols(H).array() * z.middleCols(2 * H, H).array();  // i . g
    tanh_cur = c_cur.array().tanh();
    h_cur = z.rightCols(H).array() * tanh_cur.array();  // o . tanh(c)

    if (cache) {
      cache->acts.middleRows(static_cast<Eigen::Index>(s) * B, B) = z;
      cache->c.middleRows(static_cast<Eigen::Index>(s) * B, B) = c_cur;
      cache->tanh_c.middleRows(static_cast<Eigen::Index>(s) * B, B) = tanh_cur;
      cache->h.middleRows(static_cast<Eigen::Index>(s + 1) * B, B) = h_cur;
    }
    std::swap(h_prev, h_cur);
    std::swap(c_prev, c_cur);
  }
  return h_prev;
}

// Backprop through time. d_final is the loss gradient at the final hidden
// state. Parameter gradients are accumulated into g; input gradients (same
// layout as x, original order) are accumulated into *dx when non-null.
template <class S>
void lstm_backward(const Mat<S>& x, int B, int L, const LstmDir<S>& p,
                   TimeDirection dir, const LstmCache<S>& cache,
                   const Mat<S>& d_final, LstmDir<S>& g, Mat<S>* dx = nullptr) {
  const int H = static_cast<int>(p.Wh.rows());
  Mat<S> dh = d_final;
  Mat<S> dc = Mat<S>::Zero(B, H);
  // dz stored by original timestep so the weight/input grads are single GEMMs.
  Mat<S> dz(static_cast<Eigen::Index>(B) * L, 4 * H);
  Mat<S> dzs(B, 4 * H);

  for (int s = L - 1; s >= 0; --s) {
    const int t = dir == TimeDirection::forward ? s : L - 1 - s;
    const auto A = cache.acts.middleRows(static_cast<Eigen::Index>(s) * B, B);
    const auto gate_i = A.leftCols(H).array();
    const auto gate_f = A.middleCols(H, H).array();
    const auto gate_g = A.middleCols(2 * H, H).array();
    const auto gate_o = A.rightCols(H).array();
    const auto tanh_c = cache.tanh_c.middleRows(static_cast<Eigen::Index>(s) * B, B).array();

    dzs.rightCols(H) = dh.array() * tanh_c * gate_o * (S(1) - gate_o);
    dc.array() += dh.array() * gate_o * (S(1) - tanh_c.square());
    if (s > 0) {
      const auto c_prev = cache.c.middleRows(static_cast<Eigen::Index>(s - 1) * B, B).array();
      dzs.middleCols(H, H) = dc.array() * c_prev * gate_f * (S(1) - gate_f);
    } else {
      dzs.middleCols(H, H).setZero();  // c_{-1} = 0
    }
    dzs.leftCols(H) = dc.array() * gate_g * gate_i * (S(1) - gate_i);
    dzs.middleCols(2 * H, H) = dc.array() * gate_i * (S(1) - gate_g.square());

    dz.middleRows(static_cast<Eigen::Index>(t) * B, B) = dzs;
    g.Wh.noalias() +=
        cache.h.middleRows(static_cast<Eigen::Index>(s) * B, B).transpose() * dzs;
    dh.noalias() = dzs * p.Wh.transpose();
    dc.array() *= gate_f;
  }

  g.Wx.noalias() += x.transpose() * dz;
  g.b += dz.colwise().sum().transpose();
  if (dx) dx->noalias() += dz * p.Wx.transpose();
}

// Inverted-dropout mask: each entry is 0 with probability rate, else
// 1/(1-rate). Entries are drawn in column-major storage order.
template <class S>
Mat<S> dropout_mask(int rows, int cols, double rate, Prng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout: rate must lie in [0, 1)");
  Mat<S> mask(rows, cols);
  const S keep = static_cast<S>(1.0 / (1.0 - rate));
  for (Eigen::Index k = 0; k < mask.size(); ++k)
    mask.data()[k] = rng.uniform() < rate ? S(0) : keep;
  return mask;
}

template <class S>
struct BnCache {
  RowVec<S> mean, var, inv_std;  // biased batch statistics
  Mat<S> xhat;
};

// Training-mode batch norm: normalize by batch statistics, scale-shift by
// gamma/beta. Batch statistics land in the cache; the running-stat update is
// applied separately so the forward pass stays pure in the parameters.
template <class S>
Mat<S> batchnorm_train(const Mat<S>& x, const BatchNormParams<S>& p, S eps, BnCache<S>& cache) {
  if (x.rows() < 2)
    throw ConfigError("batchnorm: training mode needs batch size >= 2");
  cache.mean = x.colwise().mean();
  Mat<S> centered = x.rowwise() - cache.mean;
  cache.var = centered.array().square().colwise().mean();
  cache.inv_std = (cache.var.array() + eps).rsqrt();
  cache.xhat = centered.array().rowwise() * cache.inv_std.array();
  Mat<S> y = cache.xhat.array().rowwise() * p.gamma.transpose().array();
  y.rowwise() += p.beta.transpose();
  return y;
}

template <class S>
Mat<S> batchnorm_infer(const Mat<S>& x, const BatchNormParams<S>& p, S eps) {
  const RowVec<S> inv_std = (p.running_var.transpose().array() + eps).rsqrt();
  Mat<S> y = (x.rowwise() - p.running_mean.transpose()).array().rowwise() *
             (inv_std.array() * p.gamma.transpose().array());
  y.rowwise() += p.beta.transpose();
  return y;
}

template <class S>
void bn_update_running(BatchNormParams<S>& p, const BnCache<S>& cache, S momentum) {
  p.running_mean = momentum * p.running_mean + (S(1) - momentum) * cache.mean.transpose();
  p.running_var = momentum * p.running_var + (S(1) - momentum) * cache.var.transpose();
}

// Returns dx; accumulates dgamma/dbeta.
template <class S>
Mat<S> batchnorm_backward(const Mat<S>& dy, const BatchNormParams<S>& p,
                          const BnCache<S>& cache, Vec<S>& dgamma, Vec<S>& dbeta) {
  const auto B = static_cast<S>(dy.rows());
  dgamma += (dy.array() * cache.xhat.array()).colwise().sum().matrix().transpose();
  dbeta += dy.colwise().sum().transpose();

  Mat<S> dxhat = dy.array().rowwise() * p.gamma.transpose().array();
  const RowVec<S> sum_dxhat = dxhat.colwise().sum();
  const RowVec<S> sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).colwise().sum();
  Mat<S> dx = B * dxhat;
  dx.rowwise() -= sum_dxhat;
  dx -= (cache.xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
  dx.array().rowwise() *= (cache.inv_std.array() / B);
  return dx;
}

enum class Activation { none, relu, softmax };

template <class S>
Mat<S> linear(const Mat<S>& x, const DenseParams<S>& p) {
  if (x.cols() != p.W.rows()) throw ConfigError("dense: input width does not match weights");
  Mat<S> y = x * p.W;
  y.rowwise() += p.b.transpose();
  return y;
}

template <class S>
Mat<S> softmax_rows(const Mat<S>& logits) {
  Mat<S> y = (logits.colwise() - logits.rowwise().maxCoeff()).array().exp();
  y.array().colwise() /= y.rowwise().sum().array();
  return y;
}

template <class S>
Mat<S> dense_forward(const Mat<S>& x, const DenseParams<S>& p, Activation act) {
  Mat<S> y = linear(x, p);
  switch (act) {
    case Activation::none: return y;
    case Activation::relu: return y.cwiseMax(S(0));
    case Activation::softmax: return softmax_rows(y);
  }
  return y;
}

inline constexpr double kProbClamp = 1e-12;

// Weighted mean of -log probs[i, labels[i]] with fixed normalizer B, so the
// class weights rescale per-class contributions without renormalizing.
template <class S>
S weighted_nll(const Mat<S>& probs, const std::vector<int>& labels,
               const std::vector<S>& sample_weights) {
  const auto B = probs.rows();
  if (static_cast<Eigen::Index>(labels.size()) != B ||
      static_cast<Eigen::Index>(sample_weights.size()) != B)
    throw ConfigError("loss: labels/sample_weights size mismatch");
  S total = 0;
  for (Eigen::Index i = 0; i < B; ++i) {
    if (labels[i] < 0 || labels[i] >= probs.cols())
      throw ConfigError("loss: label " + std::to_string(labels[i]) + " out of range");
    const S pr = std::max(probs(i, labels[i]), static_cast<S>(kProbClamp));
    total -= sample_weights[i] * std::log(pr);
  }
  return total / static_cast<S>(B);
}

// Fused softmax + cross-entropy gradient on the logits:
// dlogits[i] = sw[i]/B * (probs[i] - onehot(labels[i])).
template <class S>
Mat<S> softmax_xent_backward(const Mat<S>& probs, const std::vector<int>& labels,
                             const std::vector<S>& sample_weights) {
  const auto B = probs.rows();
  Mat<S> d = probs;
  for (Eigen::Index i = 0; i < B; ++i) {
    d(i, labels[i]) -= S(1);
    d.row(i) *= sample_weights[i] / static_cast<S>(B);
  }
  return d;
}

}  // namespace vhp::net
