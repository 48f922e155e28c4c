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

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "visenc/learners/tree.hpp"

namespace visenc::learners {

/// Seed for ensemble member `member` derived from the learner seed.
inline std::uint64_t member_seed(std::uint64_t seed, std::size_t member) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), 0x7265u};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct TreeEnsembleOptions {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  TreeOptions tree;
};

/// Unweighted majority over trees; ties go to label 0.
class TreeEnsemble : public Classifier {
 public:
  static TreeEnsemble fit(const FeatureMatrix& x, std::span<const int> y, const TreeEnsembleOptions& opt, std::uint64_t seed,
                          const char* who = "TreeEnsemble") {
    check_training_set(x, y, false, who);
    if (opt.n_trees == 0) throw PreconditionError(std::string(who) + ": n_trees must be >= 1");
    TreeEnsemble e;
    e.n_features_ = x.cols();
    const std::size_t n = x.rows();
    for (std::size_t t = 0; t < opt.n_trees; ++t) {
      Rng rng(member_seed(seed, t));
      std::vector<std::size_t> idx(n);
      if (opt.bootstrap) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& i : idx) i = pick(rng);
      } else {
        std::iota(idx.begin(), idx.end(), 0);
      }
      e.trees_.push_back(DecisionTree::fit(x, y, opt.tree, std::move(idx), {}, &rng));
    }
    return e;
  }

  int predict(std::span<const double> x) const override {
    std::size_t ones = 0;
    for (const auto& t : trees_) ones += static_cast<std::size_t>(t.predict(x));
    return 2 * ones > trees_.size() ? 1 : 0;
  }

  std::size_t n_features() const override { return n_features_; }
  std::size_t size() const { return trees_.size(); }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t n_features_ = 0;
};

inline std::size_t sqrt_features(std::size_t d) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
}

/// 100 bootstrapped trees, sqrt(d) candidate features per split.
inline TreeEnsemble fit_random_forest(const FeatureMatrix& x, std::span<const int> y, std::size_t n_trees,
                                      std::uint64_t seed) {
  TreeEnsembleOptions opt;
  opt.n_trees = n_trees;
  opt.bootstrap = true;
  opt.tree.max_features = sqrt_features(x.cols());
  return TreeEnsemble::fit(x, y, opt, seed, "RandomForest");
}

/// Extremely randomized trees: no bootstrap, sqrt(d) candidate features per
/// split, one uniform random threshold per candidate.
inline TreeEnsemble fit_extra_trees(const FeatureMatrix& x, std::span<const int> y, std::size_t n_trees,
                                    std::uint64_t seed) {
  TreeEnsembleOptions opt;
  opt.n_trees = n_trees;
  opt.bootstrap = false;
  opt.tree.max_features = sqrt_features(x.cols());
  opt.tree.random_thresholds = true;
  return TreeEnsemble::fit(x, y, opt, seed, "ExtraRandomizedForest");
}

/// Bootstrapped full CART trees over all features.
inline TreeEnsemble fit_bagging(const FeatureMatrix& x, std::span<const int> y, std::size_t n_estimators,
                                std::uint64_t seed) {
  TreeEnsembleOptions opt;
  opt.n_trees = n_estimators;
  opt.bootstrap = true;
  return TreeEnsemble::fit(x, y, opt, seed, "Bagging");
}

struct AdaBoostOptions {
  std::size_t n_estimators = 50;
  double error_floor = 1e-10;
};

/// Discrete AdaBoost (SAMME, two classes) over depth-1 stumps.
class AdaBoost : public Classifier {
 public:
  static AdaBoost fit(const FeatureMatrix& x, std::span<const int> y, const AdaBoostOptions& opt = {}) {
    check_training_set(x, y, true, "AdaBoost");
    const std::size_t n = x.rows();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    TreeOptions stump;
    stump.max_depth = 1;

    AdaBoost m;
    m.n_features_ = x.cols();
    for (std::size_t round = 0; round < opt.n_estimators; ++round) {
      DecisionTree t = DecisionTree::fit(x, y, stump, all, w);
      double err = 0.0, total = 0.0;
      std::vector<char> miss(n);
      for (std::size_t i = 0; i < n; ++i) {
        miss[i] = t.predict(x.row(i)) != y[i];
        total += w[i];
        if (miss[i]) err += w[i];
      }
      err /= total;
      if (err >= 0.5) {
        // No better than chance on the current weights: stop, keeping at
        // least one stump.
        if (m.stumps_.empty()) {
          m.stumps_.push_back(std::move(t));
          m.alpha_.push_back(1.0);
        }
        break;
      }
      const bool perfect = err <= opt.error_floor;
      err = std::max(err, opt.error_floor);
      const double alpha = std::log((1.0 - err) / err);
      m.stumps_.push_back(std::move(t));
      m.alpha_.push_back(alpha);
      if (perfect) break;
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (miss[i]) w[i] *= std::exp(alpha);
        sum += w[i];
      }
      for (double& wi : w) wi /= sum;
    }
    return m;
  }

  /// Weighted vote of the first `stages` stumps, each voting +1 or -1.
  double staged_score(std::span<const double> x, std::size_t stages) const {
    double score = 0.0;
    const std::size_t k = std::min(stages, stumps_.size());
    for (std::size_t i = 0; i < k; ++i) score += alpha_[i] * (stumps_[i].predict(x) == 1 ? 1.0 : -1.0);
    return score;
  }

  /// Prediction using only the first `stages` stumps.
  int predict_staged(std::span<const double> x, std::size_t stages) const {
    return staged_score(x, stages) > 0.0 ? 1 : 0;
  }

  int predict(std::span<const double> x) const override { return predict_staged(x, stumps_.size()); }
  std::size_t n_features() const override { return n_features_; }
  std::size_t size() const { return stumps_.size(); }

 private:
  std::vector<DecisionTree> stumps_;
  std::vector<double> alpha_;
  std::size_t n_features_ = 0;
};

}  // namespace visenc::learners
