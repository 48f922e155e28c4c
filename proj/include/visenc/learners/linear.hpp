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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "visenc/learners/common.hpp"

namespace visenc::learners {

/// Weights plus bias; label 1 iff w.x + b > 0.
class LinearModel : public Classifier {
 public:
  LinearModel(std::vector<double> w, double b) : w_(std::move(w)), b_(b) {}

  double decision(std::span<const double> x) const { return dot(w_, x) + b_; }
  int predict(std::span<const double> x) const override { return decision(x) > 0.0 ? 1 : 0; }
  std::size_t n_features() const override { return w_.size(); }

  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  std::vector<double> w_;
  double b_;
};

struct LogisticOptions {
  double l2 = 1.0;  // inverse regularization strength C
  int max_iter = 1000;
  double tol = 1e-4;
};

namespace detail {

// Mean log-loss plus (1 / 2Cn)|w|^2; bias is not penalized. Returns the
// objective and writes the gradient (w then b) into `grad`.
inline double logistic_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> wb,
                                 double c, std::vector<double>& grad) {
  const std::size_t n = x.rows(), d = x.cols();
  grad.assign(d + 1, 0.0);
  double loss = 0.0;
  const std::span<const double> w = wb.first(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = dot(w, x.row(i)) + wb[d];
    const double s = y[i] == 1 ? 1.0 : -1.0;
    loss += softplus(-s * z);
    const double g = -s * sigmoid(-s * z);
    auto xi = x.row(i);
    for (std::size_t j = 0; j < d; ++j) grad[j] += g * xi[j];
    grad[d] += g;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double reg = 1.0 / (c * static_cast<double>(n));
  double wsq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    grad[j] = grad[j] * inv_n + reg * w[j];
    wsq += w[j] * w[j];
  }
  grad[d] *= inv_n;
  return loss * inv_n + 0.5 * reg * wsq;
}

}  // namespace detail

/// L2-penalized logistic regression, gradient descent with backtracking
/// (Armijo) step selection. Stops when the max-norm of the gradient drops
/// below `tol` or after `max_iter` iterations.
inline LinearModel fit_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticOptions& opt = {}) {
  check_training_set(x, y, true, "LogisticRegression");
  const std::size_t d = x.cols();
  std::vector<double> wb(d + 1, 0.0), grad, trial(d + 1), trial_grad;
  double f = detail::logistic_objective(x, y, wb, opt.l2, grad);
  double step = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    double gmax = 0.0, gsq = 0.0;
    for (double g : grad) {
      gmax = std::max(gmax, std::fabs(g));
      gsq += g * g;
    }
    if (gmax <= opt.tol) break;
    step = std::min(step * 2.0, 1e6);
    for (;;) {
      for (std::size_t j = 0; j <= d; ++j) trial[j] = wb[j] - step * grad[j];
      const double ft = detail::logistic_objective(x, y, trial, opt.l2, trial_grad);
      if (ft <= f - 0.5 * step * gsq || step < 1e-12) {
        wb.swap(trial);
        grad.swap(trial_grad);
        f = ft;
        break;
      }
      step *= 0.5;
    }
  }
  const double b = wb[d];
  wb.pop_back();
  return LinearModel(std::move(wb), b);
}

struct LinearSvmOptions {
  double l2 = 1.0;  // C in (1/2)|w|^2 + C * sum(hinge)
  int epochs = 1000;
};

/// Linear SVM minimizing (lambda/2)|w|^2 + mean hinge loss, lambda = 1 / (C n),
/// by full-batch subgradient descent. The bias is carried as an extra,
/// unpenalized coordinate. Steps are normalized, 1 / (|g| sqrt(t)); the
/// classic 1 / (lambda t) schedule overshoots badly when lambda is small.
/// Subgradient steps are not monotone, so the best iterate seen is returned.
inline LinearModel fit_linear_svm(const FeatureMatrix& x, std::span<const int> y, const LinearSvmOptions& opt = {}) {
  check_training_set(x, y, true, "LinearSVM");
  const std::size_t n = x.rows(), d = x.cols();
  const double lambda = 1.0 / (opt.l2 * static_cast<double>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> w(d + 1, 0.0), grad(d + 1), best = w;
  double best_obj = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= opt.epochs + 1; ++t) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = y[i] == 1 ? 1.0 : -1.0;
      const double margin = s * (dot(std::span<const double>(w).first(d), x.row(i)) + w[d]);
      if (margin < 1.0) {
        hinge += 1.0 - margin;
        auto xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) grad[j] -= s * xi[j] * inv_n;
        grad[d] -= s * inv_n;
      }
    }
    double wsq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      wsq += w[j] * w[j];
      grad[j] += lambda * w[j];
    }
    const double obj = 0.5 * lambda * wsq + hinge * inv_n;
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
    if (t > opt.epochs) break;
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) break;
    const double eta = 1.0 / (gnorm * std::sqrt(static_cast<double>(t)));
    for (std::size_t j = 0; j <= d; ++j) w[j] -= eta * grad[j];
  }
  const double b = best[d];
  best.pop_back();
  return LinearModel(std::move(best), b);
}

}  // namespace visenc::learners
