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
//
// Generative classifiers built on class-conditional Gaussians: naive Bayes
// (diagonal), linear discriminant (pooled covariance) and quadratic
// discriminant (per-class covariance).

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "visenc/learners/common.hpp"

namespace visenc::learners {

namespace detail {

struct ClassStats {
  std::array<std::size_t, 2> count{};
  std::array<Eigen::VectorXd, 2> mean;
};

inline ClassStats class_means(const FeatureMatrix& x, std::span<const int> y) {
  ClassStats s;
  const auto d = static_cast<Eigen::Index>(x.cols());
  s.mean[0] = Eigen::VectorXd::Zero(d);
  s.mean[1] = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    s.mean[y[i]] += Eigen::Map<const Eigen::VectorXd>(x.row(i).data(), d);
    ++s.count[y[i]];
  }
  for (int c = 0; c < 2; ++c) s.mean[c] /= static_cast<double>(s.count[c]);
  return s;
}

// Scatter matrix sum_i (x_i - mean)(x_i - mean)^T over samples of `cls`.
inline Eigen::MatrixXd scatter(const FeatureMatrix& x, std::span<const int> y, int cls, const Eigen::VectorXd& mean) {
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd centered(static_cast<Eigen::Index>(x.rows()), d);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (y[i] != cls) continue;
    centered.row(r++) = (Eigen::Map<const Eigen::VectorXd>(x.row(i).data(), d) - mean).transpose();
  }
  centered.conservativeResize(r, d);
  return centered.transpose() * centered;
}

// Adds ridge_scale * trace / dim to the diagonal so that constant features
// (zero-variance background pixels) still yield a positive-definite matrix.
inline void add_ridge(Eigen::MatrixXd& cov, double ridge_scale) {
  const double d = static_cast<double>(cov.rows());
  double ridge = ridge_scale * cov.trace() / d;
  if (!(ridge > 0.0)) ridge = ridge_scale;
  cov.diagonal().array() += ridge;
}

}  // namespace detail

struct NaiveBayesOptions {
  double var_smoothing = 1e-9;
};

/// Per-class, per-feature Gaussians with a shared variance floor of
/// var_smoothing times the largest feature variance.
class GaussianNaiveBayes : public Classifier {
 public:
  static GaussianNaiveBayes fit(const FeatureMatrix& x, std::span<const int> y, const NaiveBayesOptions& opt = {}) {
    check_training_set(x, y, true, "GaussianNaiveBayes");
    const std::size_t n = x.rows(), d = x.cols();
    GaussianNaiveBayes m;
    m.mean_.fill(std::vector<double>(d, 0.0));
    m.var_.fill(std::vector<double>(d, 0.0));
    std::array<std::size_t, 2> count{};
    for (std::size_t i = 0; i < n; ++i) {
      ++count[y[i]];
      auto xi = x.row(i);
      for (std::size_t j = 0; j < d; ++j) m.mean_[y[i]][j] += xi[j];
    }
    for (int c = 0; c < 2; ++c)
      for (double& v : m.mean_[c]) v /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < n; ++i) {
      auto xi = x.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        const double e = xi[j] - m.mean_[y[i]][j];
        m.var_[y[i]][j] += e * e;
      }
    }
    for (int c = 0; c < 2; ++c)
      for (double& v : m.var_[c]) v /= static_cast<double>(count[c]);

    // Largest overall feature variance sets the floor.
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double mu = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) mu += x(i, j);
      mu /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) sq += (x(i, j) - mu) * (x(i, j) - mu);
      max_var = std::max(max_var, sq / static_cast<double>(n));
    }
    double floor = opt.var_smoothing * max_var;
    if (!(floor > 0.0)) floor = opt.var_smoothing;
    for (int c = 0; c < 2; ++c) {
      for (double& v : m.var_[c]) v += floor;
      m.log_prior_[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));
    }
    return m;
  }

  /// Unnormalized log posterior of class `c`.
  double log_joint(std::span<const double> x, int c) const {
    double s = log_prior_[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double e = x[j] - mean_[c][j];
      s -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + e * e / var_[c][j]);
    }
    return s;
  }

  int predict(std::span<const double> x) const override { return log_joint(x, 1) > log_joint(x, 0) ? 1 : 0; }
  std::size_t n_features() const override { return mean_[0].size(); }

 private:
  std::array<std::vector<double>, 2> mean_, var_;
  std::array<double, 2> log_prior_{};
};

struct LdaOptions {
  double ridge = 1e-6;
};

/// Linear discriminant analysis with a pooled, ridge-regularized covariance.
class LinearDiscriminant : public Classifier {
 public:
  static LinearDiscriminant fit(const FeatureMatrix& x, std::span<const int> y, const LdaOptions& opt = {}) {
    check_training_set(x, y, true, "LinearDiscriminant");
    const auto stats = detail::class_means(x, y);
    const double n = static_cast<double>(x.rows());
    Eigen::MatrixXd cov = detail::scatter(x, y, 0, stats.mean[0]) + detail::scatter(x, y, 1, stats.mean[1]);
    cov /= std::max(1.0, n - 2.0);
    detail::add_ridge(cov, opt.ridge);

    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DataError("LinearDiscriminant: covariance is not positive definite");
    const Eigen::VectorXd w = llt.solve(stats.mean[1] - stats.mean[0]);
    const double b = -0.5 * w.dot(stats.mean[1] + stats.mean[0]) +
                     std::log(static_cast<double>(stats.count[1]) / static_cast<double>(stats.count[0]));
    LinearDiscriminant m;
    m.w_.assign(w.data(), w.data() + w.size());
    m.b_ = b;
    return m;
  }

  double decision(std::span<const double> x) const { return dot(w_, x) + b_; }
  int predict(std::span<const double> x) const override { return decision(x) > 0.0 ? 1 : 0; }
  std::size_t n_features() const override { return w_.size(); }

 private:
  std::vector<double> w_;
  double b_ = 0.0;
};

struct QdaOptions {
  double ridge = 1e-6;
};

/// Quadratic discriminant analysis: one full Gaussian per class, covariance
/// with n_c - 1 normalization and the same ridge rule as LDA.
class QuadraticDiscriminant : public Classifier {
 public:
  static QuadraticDiscriminant fit(const FeatureMatrix& x, std::span<const int> y, const QdaOptions& opt = {}) {
    check_training_set(x, y, true, "QuadraticDiscriminant");
    const auto stats = detail::class_means(x, y);
    QuadraticDiscriminant m;
    for (int c = 0; c < 2; ++c) {
      if (stats.count[c] < 2) throw DataError("QuadraticDiscriminant: each class needs at least two samples");
      Eigen::MatrixXd cov = detail::scatter(x, y, c, stats.mean[c]) / static_cast<double>(stats.count[c] - 1);
      detail::add_ridge(cov, opt.ridge);
      m.chol_[c] = Eigen::LLT<Eigen::MatrixXd>(cov);
      if (m.chol_[c].info() != Eigen::Success)
        throw DataError("QuadraticDiscriminant: covariance is not positive definite");
      const Eigen::MatrixXd l = m.chol_[c].matrixL();
      m.log_det_[c] = 2.0 * l.diagonal().array().log().sum();
      m.mean_[c] = stats.mean[c];
      m.log_prior_[c] = std::log(static_cast<double>(stats.count[c]) / static_cast<double>(x.rows()));
    }
    return m;
  }

  /// Log class-conditional density plus log prior, dropping the shared
  /// (d/2) log(2 pi) term.
  double score(std::span<const double> x, int c) const {
    const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) - mean_[c];
    const Eigen::VectorXd z = chol_[c].matrixL().solve(e);
    return log_prior_[c] - 0.5 * log_det_[c] - 0.5 * z.squaredNorm();
  }

  int predict(std::span<const double> x) const override { return score(x, 1) > score(x, 0) ? 1 : 0; }
  std::size_t n_features() const override { return static_cast<std::size_t>(mean_[0].size()); }

 private:
  std::array<Eigen::LLT<Eigen::MatrixXd>, 2> chol_;
  std::array<Eigen::VectorXd, 2> mean_;
  std::array<double, 2> log_det_{}, log_prior_{};
};

}  // namespace visenc::learners
