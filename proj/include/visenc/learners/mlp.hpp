// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "visenc/learners/common.hpp"

namespace visenc::learners {

struct MlpOptions {
  std::vector<int> hidden = {32, 32, 32};
  double learning_rate = 1e-3;
  int epochs = 200;
  std::size_t batch_size = 200;  // clipped to the sample count
};

/// Fully connected ReLU network with a single sigmoid output unit, trained on
/// mean binary cross-entropy with mini-batch Adam.
class MultilayerPerceptron : public Classifier {
 public:
  /// Weights drawn uniformly in +-sqrt(6 / (fan_in + fan_out)); biases zero.
  MultilayerPerceptron(std::size_t n_inputs, const std::vector<int>& hidden, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> sizes{static_cast<Eigen::Index>(n_inputs)};
    for (int h : hidden) sizes.push_back(h);
    sizes.push_back(1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      const Eigen::Index in = sizes[l], out = sizes[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
      std::uniform_real_distribution<double> u(-limit, limit);
      Eigen::MatrixXd w(out, in);
      for (Eigen::Index j = 0; j < in; ++j)
        for (Eigen::Index i = 0; i < out; ++i) w(i, j) = u(rng);
      weights_.push_back(std::move(w));
      biases_.push_back(Eigen::VectorXd::Zero(out));
    }
  }

  static MultilayerPerceptron fit(const FeatureMatrix& x, std::span<const int> y, std::uint64_t seed,
                                  const MlpOptions& opt = {}) {
    check_training_set(x, y, true, "MultilayerPerceptron");
    MultilayerPerceptron net(x.cols(), opt.hidden, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

    const std::size_t n = x.rows();
    const std::size_t batch = std::clamp<std::size_t>(opt.batch_size, 1, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> params = net.flat_params(), grad, m(params.size(), 0.0), v(params.size(), 0.0);
    long step = 0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t end = std::min(n, start + batch);
        net.loss_and_gradient(x, y, std::span<const std::size_t>(order).subspan(start, end - start), grad);
        ++step;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t p = 0; p < params.size(); ++p) {
          m[p] = beta1 * m[p] + (1.0 - beta1) * grad[p];
          v[p] = beta2 * v[p] + (1.0 - beta2) * grad[p] * grad[p];
          params[p] -= opt.learning_rate * (m[p] / c1) / (std::sqrt(v[p] / c2) + eps);
        }
        net.set_flat_params(params);
      }
    }
    return net;
  }

  /// Pre-sigmoid output.
  double logit(std::span<const double> x) const {
    Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      h = weights_[l] * h + biases_[l];
      if (l + 1 < weights_.size()) h = h.cwiseMax(0.0);
    }
    return h(0);
  }

  double probability(std::span<const double> x) const { return sigmoid(logit(x)); }
  int predict(std::span<const double> x) const override { return probability(x) > 0.5 ? 1 : 0; }
  std::size_t n_features() const override { return static_cast<std::size_t>(weights_.front().cols()); }

  /// Mean cross-entropy over `batch` rows of `x`; `grad` receives the
  /// gradient in flat_params() layout.
  double loss_and_gradient(const FeatureMatrix& x, std::span<const int> y, std::span<const std::size_t> batch,
                           std::vector<double>& grad) const {
    const auto b = static_cast<Eigen::Index>(batch.size());
    const auto d = static_cast<Eigen::Index>(x.cols());
    const std::size_t layers = weights_.size();

    std::vector<Eigen::MatrixXd> act(layers + 1);  // act[0] = input, act[l] = post-activation
    act[0].resize(d, b);
    for (Eigen::Index c = 0; c < b; ++c)
      act[0].col(c) = Eigen::Map<const Eigen::VectorXd>(x.row(batch[static_cast<std::size_t>(c)]).data(), d);
    for (std::size_t l = 0; l < layers; ++l) {
      act[l + 1] = (weights_[l] * act[l]).colwise() + biases_[l];
      if (l + 1 < layers) act[l + 1] = act[l + 1].cwiseMax(0.0);
    }

    double loss = 0.0;
    Eigen::MatrixXd delta(1, b);
    for (Eigen::Index c = 0; c < b; ++c) {
      const double z = act[layers](0, c);
      const double t = y[batch[static_cast<std::size_t>(c)]];
      loss += softplus(z) - t * z;
      delta(0, c) = (sigmoid(z) - t) / static_cast<double>(b);
    }

    std::vector<Eigen::MatrixXd> gw(layers);
    std::vector<Eigen::VectorXd> gb(layers);
    for (std::size_t l = layers; l-- > 0;) {
      gw[l] = delta * act[l].transpose();
      gb[l] = delta.rowwise().sum();
      if (l > 0) {
        delta = weights_[l].transpose() * delta;
        delta = delta.cwiseProduct((act[l].array() > 0.0).cast<double>().matrix());
      }
    }

    grad.clear();
    for (std::size_t l = 0; l < layers; ++l) {
      grad.insert(grad.end(), gw[l].data(), gw[l].data() + gw[l].size());
      grad.insert(grad.end(), gb[l].data(), gb[l].data() + gb[l].size());
    }
    return loss / static_cast<double>(b);
  }

  /// Weights (column-major) then bias, layer by layer.
  std::vector<double> flat_params() const {
    std::vector<double> p;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      p.insert(p.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
      p.insert(p.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
    }
    return p;
  }

  void set_flat_params(std::span<const double> p) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(off), weights_[l].size(), weights_[l].data());
      off += static_cast<std::size_t>(weights_[l].size());
      std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(off), biases_[l].size(), biases_[l].data());
      off += static_cast<std::size_t>(biases_[l].size());
    }
    if (off != p.size()) throw DimensionError("MultilayerPerceptron: parameter vector has the wrong length");
  }

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace visenc::learners
