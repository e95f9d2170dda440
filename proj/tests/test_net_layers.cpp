// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/fd_check.hpp"
#include "vhp/network.hpp"

using namespace vhp;
using namespace vhp::net;
using vhp::testsupport::fill_uniform;

namespace {

ModelConfig small_config(int L = 6, int H = 4, int C = 3, int U = 5) {
  ModelConfig cfg;
  cfg.seq_len = L;
  cfg.hidden = H;
  cfg.dense_units = U;
  cfg.num_classes = C;
  return cfg;
}

Mat<double> random_input(Prng& rng, int B, int L, int D = 5) {
  Mat<double> x(static_cast<Eigen::Index>(B) * L, D);
  fill_uniform(x, rng, -1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("count_params matches the published architecture table") {
  ModelConfig cfg;
  cfg.num_classes = 9;
  auto n = count_params(cfg);
  CHECK(n.total == 155273);
  CHECK(n.trainable == 154761);
  CHECK(n.non_trainable == 512);

  cfg.num_classes = 29;
  n = count_params(cfg);
  CHECK(n.total == 156573);
  CHECK(n.trainable == 156061);
  CHECK(n.non_trainable == 512);

  cfg.num_classes = 12;
  n = count_params(cfg);
  CHECK(n.total == 155468);
  CHECK(n.trainable == 154956);
  CHECK(n.non_trainable == 512);
}

TEST_CASE("init_params produces exactly count_params trainable entries") {
  const auto cfg = small_config();
  auto params = init_params<double>(cfg, 11);
  long long trainable = 0, all = 0;
  visit_trainable(params, [&](TensorRef<double> r) { trainable += r.size; });
  visit_all(params, [&](TensorRef<double> r) { all += r.size; });
  const auto expect = count_params(cfg);
  CHECK(trainable == expect.trainable);
  CHECK(all == expect.total);
}

TEST_CASE("init_params: deterministic, forget bias one, glorot bounds") {
  const auto cfg = small_config();
  const auto a = init_params<float>(cfg, 5);
  const auto b = init_params<float>(cfg, 5);
  auto& am = const_cast<ModelParamsT<float>&>(a);
  auto& bm = const_cast<ModelParamsT<float>&>(b);
  bool identical = true;
  std::vector<TensorRef<float>> ar, br;
  visit_all(am, [&](TensorRef<float> r) { ar.push_back(r); });
  visit_all(bm, [&](TensorRef<float> r) { br.push_back(r); });
  for (std::size_t k = 0; k < ar.size(); ++k)
    for (Eigen::Index i = 0; i < ar[k].size; ++i)
      identical = identical && ar[k].data[i] == br[k].data[i];
  CHECK(identical);

  const auto c = init_params<float>(cfg, 6);
  CHECK(c.fwd.Wx != a.fwd.Wx);  // different seed, different weights

  const int H = cfg.hidden;
  CHECK((a.fwd.b.segment(H, H).array() == 1.0f).all());
  CHECK((a.fwd.b.segment(0, H).array() == 0.0f).all());
  CHECK((a.fwd.b.segment(2 * H, 2 * H).array() == 0.0f).all());
  CHECK((a.bn.gamma.array() == 1.0f).all());
  CHECK((a.bn.beta.array() == 0.0f).all());
  CHECK((a.bn.running_mean.array() == 0.0f).all());
  CHECK((a.bn.running_var.array() == 1.0f).all());
  CHECK((a.out.b.array() == 0.0f).all());

  const double limit = std::sqrt(6.0 / (a.dense1.W.rows() + a.dense1.W.cols()));
  CHECK(a.dense1.W.cwiseAbs().maxCoeff() <= limit);
}

TEST_CASE("lstm with all-zero parameters gives a zero final state") {
  const int B = 3, L = 7, H = 4;
  LstmDir<double> p{Mat<double>::Zero(5, 4 * H), Mat<double>::Zero(H, 4 * H),
                    Vec<double>::Zero(4 * H)};
  Prng rng(1);
  const auto x = random_input(rng, B, L);
  const auto h = lstm_forward<double>(x, B, L, p, TimeDirection::forward, nullptr);
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lstm with L=1 equals a single cell step") {
  const int B = 2, H = 3, D = 5;
  Prng rng(2);
  LstmDir<double> p{Mat<double>(D, 4 * H), Mat<double>(H, 4 * H), Vec<double>(4 * H)};
  fill_uniform(p.Wx, rng, -0.8, 0.8);
  fill_uniform(p.Wh, rng, -0.8, 0.8);
  fill_uniform(p.b, rng, -0.5, 0.5);
  const auto x = random_input(rng, B, 1, D);

  const auto h = lstm_forward<double>(x, B, 1, p, TimeDirection::forward, nullptr);

  // independent scalar re-derivation of one cell step (h_prev = c_prev = 0)
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < H; ++j) {
      double zi = p.b(j), zf = p.b(H + j), zg = p.b(2 * H + j), zo = p.b(3 * H + j);
      for (int d = 0; d < D; ++d) {
        zi += x(i, d) * p.Wx(d, j);
        zf += x(i, d) * p.Wx(d, H + j);
        zg += x(i, d) * p.Wx(d, 2 * H + j);
        zo += x(i, d) * p.Wx(d, 3 * H + j);
      }
      const double c = sigmoid(zi) * std::tanh(zg);
      const double expect = sigmoid(zo) * std::tanh(c);
      CHECK(h(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("backward direction consumes the reversed sequence") {
  const int B = 1, L = 5, H = 3, D = 5;
  Prng rng(3);
  LstmDir<double> p{Mat<double>(D, 4 * H), Mat<double>(H, 4 * H), Vec<double>(4 * H)};
  fill_uniform(p.Wx, rng, -0.8, 0.8);
  fill_uniform(p.Wh, rng, -0.8, 0.8);
  fill_uniform(p.b, rng, -0.5, 0.5);

  const auto x = random_input(rng, B, L, D);
  Mat<double> x_rev(x.rows(), x.cols());
  for (int t = 0; t < L; ++t) x_rev.row(t) = x.row(L - 1 - t);

  const auto h_bwd = lstm_forward<double>(x, B, L, p, TimeDirection::backward, nullptr);
  const auto h_fwd_on_rev = lstm_forward<double>(x_rev, B, L, p, TimeDirection::forward, nullptr);
  CHECK((h_bwd - h_fwd_on_rev).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("palindromic input with mirrored weights makes both halves equal") {
  const int B = 2, L = 6, H = 4, D = 5;
  Prng rng(4);
  LstmDir<double> p{Mat<double>(D, 4 * H), Mat<double>(H, 4 * H), Vec<double>(4 * H)};
  fill_uniform(p.Wx, rng, -0.8, 0.8);
  fill_uniform(p.Wh, rng, -0.8, 0.8);
  fill_uniform(p.b, rng, -0.5, 0.5);

  Mat<double> x(static_cast<Eigen::Index>(B) * L, D);
  for (int t = 0; t < L; ++t) {
    const int mirror = L - 1 - t;
    if (t <= mirror) {
      Mat<double> block(B, D);
      fill_uniform(block, rng, -1.0, 1.0);
      x.middleRows(static_cast<Eigen::Index>(t) * B, B) = block;
      x.middleRows(static_cast<Eigen::Index>(mirror) * B, B) = block;
    }
  }
  const auto hf = lstm_forward<double>(x, B, L, p, TimeDirection::forward, nullptr);
  const auto hb = lstm_forward<double>(x, B, L, p, TimeDirection::backward, nullptr);
  CHECK((hf - hb).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("bilstm concatenation has width 2H = 256 for the default config") {
  ModelConfig cfg;  // hidden 128
  cfg.num_classes = 9;
  cfg.seq_len = 3;
  const auto params = init_params<float>(cfg, 1);
  Prng rng(5);
  Mat<float> x = Mat<float>::Zero(3 * 2, 5);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, static_cast<int>(rng.below(5))) = 1.0f;

  const auto hf = lstm_forward<float>(x, 2, 3, params.fwd, TimeDirection::forward, nullptr);
  const auto hb = lstm_forward<float>(x, 2, 3, params.bwd, TimeDirection::backward, nullptr);
  CHECK(hf.cols() + hb.cols() == 256);
  CHECK(cfg.bn_width() == 256);
}

TEST_CASE("dropout mask: rate 0 identity, values in {0, 1/(1-rate)}") {
  Prng rng(6);
  const auto id_mask = dropout_mask<double>(4, 6, 0.0, rng);
  CHECK((id_mask.array() == 1.0).all());

  const auto mask = dropout_mask<double>(20, 20, 0.2, rng);
  const double keep = 1.0 / 0.8;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    const double v = mask.data()[i];
    CHECK((v == 0.0 || v == doctest::Approx(keep).epsilon(1e-12)));
  }
}

TEST_CASE("inverted dropout preserves the expected value within 1%") {
  Prng rng(7);
  double sum = 0.0;
  const int trials = 100000;
  const Eigen::Index cells = 16;
  for (int i = 0; i < trials; ++i)
    sum += dropout_mask<double>(4, 4, 0.2, rng).sum();
  const double mean = sum / (trials * static_cast<double>(cells));
  CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("batch norm training: near-zero mean, near-unit variance") {
  const int B = 64, W = 8;
  Prng rng(8);
  Mat<double> x(B, W);
  fill_uniform(x, rng, -30.0, 30.0);  // variance >> epsilon
  BatchNormParams<double> p{Vec<double>::Ones(W), Vec<double>::Zero(W), Vec<double>::Zero(W),
                            Vec<double>::Ones(W)};
  BnCache<double> cache;
  const auto y = batchnorm_train(x, p, 1e-3, cache);

  for (int j = 0; j < W; ++j) {
    const double mean = y.col(j).mean();
    const double var = (y.col(j).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-10);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("batch norm: constant feature column collapses to beta") {
  const int B = 8, W = 3;
  Mat<double> x = Mat<double>::Constant(B, W, 4.2);
  BatchNormParams<double> p{Vec<double>::Ones(W), Vec<double>::Zero(W), Vec<double>::Zero(W),
                            Vec<double>::Ones(W)};
  p.beta << -1.0, 0.5, 2.0;
  BnCache<double> cache;
  const auto y = batchnorm_train(x, p, 1e-3, cache);
  for (int j = 0; j < W; ++j)
    for (int i = 0; i < B; ++i) CHECK(y(i, j) == doctest::Approx(p.beta(j)).epsilon(1e-12));
}

TEST_CASE("batch norm rejects batch size 1 in training mode") {
  Mat<double> x = Mat<double>::Ones(1, 4);
  BatchNormParams<double> p{Vec<double>::Ones(4), Vec<double>::Zero(4), Vec<double>::Zero(4),
                            Vec<double>::Ones(4)};
  BnCache<double> cache;
  CHECK_THROWS_AS(batchnorm_train(x, p, 1e-3, cache), ConfigError);
}

TEST_CASE("batch norm running stats follow the momentum rule") {
  const int B = 16, W = 4;
  Prng rng(9);
  Mat<double> x(B, W);
  fill_uniform(x, rng, -2.0, 2.0);
  BatchNormParams<double> p{Vec<double>::Ones(W), Vec<double>::Zero(W), Vec<double>::Zero(W),
                            Vec<double>::Ones(W)};
  BnCache<double> cache;
  batchnorm_train(x, p, 1e-3, cache);
  bn_update_running(p, cache, 0.99);
  for (int j = 0; j < W; ++j) {
    CHECK(p.running_mean(j) == doctest::Approx(0.01 * cache.mean(j)).epsilon(1e-12));
    CHECK(p.running_var(j) == doctest::Approx(0.99 + 0.01 * cache.var(j)).epsilon(1e-12));
  }
}

TEST_CASE("dense: identity weights with relu pass nonnegative input through") {
  const int B = 4, W = 5;
  DenseParams<double> p{Mat<double>::Identity(W, W), Vec<double>::Zero(W)};
  Prng rng(10);
  Mat<double> x(B, W);
  fill_uniform(x, rng, 0.0, 2.0);
  const auto y = dense_forward(x, p, Activation::relu);
  CHECK((y - x).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("softmax rows sum to one") {
  Prng rng(11);
  Mat<double> logits(6, 9);
  fill_uniform(logits, rng, -5.0, 5.0);
  const auto probs = softmax_rows(logits);
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    CHECK(std::abs(probs.row(i).sum() - 1.0) < 1e-9);
    CHECK(probs.row(i).minCoeff() >= 0.0);
  }
}

TEST_CASE("loss: perfect predictions, uniform predictions, weight scaling") {
  const int C = 9;
  Mat<double> perfect = Mat<double>::Zero(3, C);
  std::vector<int> labels = {0, 4, 8};
  for (int i = 0; i < 3; ++i) perfect(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  std::vector<double> ones(3, 1.0);
  CHECK(weighted_nll(perfect, labels, ones) == doctest::Approx(0.0).epsilon(1e-9));

  Mat<double> uniform = Mat<double>::Constant(3, C, 1.0 / C);
  CHECK(weighted_nll(uniform, labels, ones) ==
        doctest::Approx(std::log(9.0)).epsilon(1e-12));

  Prng rng(12);
  Mat<double> logits(5, C);
  fill_uniform(logits, rng, -2.0, 2.0);
  const auto probs = softmax_rows(logits);
  std::vector<int> y = {1, 3, 0, 8, 2};
  std::vector<double> w1(5, 1.0), w2(5, 2.0);
  CHECK(weighted_nll(probs, y, w2) ==
        doctest::Approx(2.0 * weighted_nll(probs, y, w1)).epsilon(1e-12));

  std::vector<int> bad = {1, 3, 0, 8, C};
  CHECK_THROWS_AS(weighted_nll(probs, bad, w1), ConfigError);
}

TEST_CASE("fused softmax cross-entropy gradient is probs minus one-hot") {
  Prng rng(13);
  Mat<double> logits(4, 6);
  fill_uniform(logits, rng, -2.0, 2.0);
  const auto probs = softmax_rows(logits);
  std::vector<int> labels = {2, 0, 5, 1};
  std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  const auto d = softmax_xent_backward(probs, labels, w);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 6; ++c) {
      const double expect = (probs(i, c) - (labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0)) / 4.0;
      CHECK(d(i, c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("network: zero sample weights give zero gradients") {
  const auto cfg = small_config();
  const Network<double> net(cfg);
  const auto params = init_params<double>(cfg, 3);
  Prng rng(14);
  const auto x = random_input(rng, 3, cfg.seq_len);
  std::vector<int> labels = {0, 1, 2};
  std::vector<double> zero_w(3, 0.0);

  ForwardCache<double> cache;
  Prng drop(99);
  net.forward_train(params, x, 3, drop, cache);
  auto grads = zeros_like_params<double>(cfg);
  net.backward(params, x, cache, labels, zero_w, grads);

  double worst = 0;
  visit_trainable(grads, [&](TensorRef<double> r) {
    for (Eigen::Index i = 0; i < r.size; ++i) worst = std::max(worst, std::abs(r.data[i]));
  });
  CHECK(worst == 0.0);
}

TEST_CASE("network: gradients are finite on random inputs") {
  const auto cfg = small_config(8, 6, 4);
  const Network<double> net(cfg);
  const auto params = init_params<double>(cfg, 21);
  Prng rng(15);
  const auto x = random_input(rng, 4, cfg.seq_len);
  std::vector<int> labels = {3, 1, 0, 2};
  std::vector<double> w = {1.0, 0.5, 2.0, 1.0};

  ForwardCache<double> cache;
  Prng drop(100);
  net.forward_train(params, x, 4, drop, cache);
  auto grads = zeros_like_params<double>(cfg);
  net.backward(params, x, cache, labels, w, grads);

  bool finite = true;
  visit_trainable(grads, [&](TensorRef<double> r) {
    for (Eigen::Index i = 0; i < r.size; ++i) finite = finite && std::isfinite(r.data[i]);
  });
  CHECK(finite);
}

TEST_CASE("inference-mode forward is pure") {
  const auto cfg = small_config();
  const Network<float> net(cfg);
  const auto params = init_params<float>(cfg, 17);
  Prng rng(16);
  Mat<float> x = Mat<float>::Zero(static_cast<Eigen::Index>(2) * cfg.seq_len, 5);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, static_cast<int>(rng.below(5))) = 1.0f;

  const auto p1 = net.forward_infer(params, x, 2);
  const auto p2 = net.forward_infer(params, x, 2);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0f);
  for (Eigen::Index i = 0; i < p1.rows(); ++i)
    CHECK(std::abs(p1.row(i).sum() - 1.0f) < 1e-6f);
}
