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
// CART classification tree with weighted Gini impurity. The same builder
// backs the single tree, the random and extremely randomized forests,
// bagging, and the AdaBoost stumps.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "visenc/learners/common.hpp"

namespace visenc::learners {

using Rng = std::mt19937_64;

struct TreeOptions {
  int max_depth = 0;                 // 0 = unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;      // features examined per split; 0 = all
  bool random_thresholds = false;    // one uniform threshold per candidate feature
};

class DecisionTree : public Classifier {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };

  /// Fits on the rows `sample_idx` of `x` (duplicates allowed, as produced by
  /// bootstrap draws). `weights`, if non-empty, is indexed by row of `x`.
  /// `rng` is required when max_features or random_thresholds is used.
  static DecisionTree fit(const FeatureMatrix& x, std::span<const int> y, const TreeOptions& opt,
                          std::vector<std::size_t> sample_idx, std::span<const double> weights = {},
                          Rng* rng = nullptr) {
    if (sample_idx.empty()) throw PreconditionError("DecisionTree: no samples");
    const bool needs_rng = opt.random_thresholds || (opt.max_features != 0 && opt.max_features < x.cols());
    if (needs_rng && rng == nullptr) throw PreconditionError("DecisionTree: randomized options need an rng");
    Builder b{x, y, opt, weights, rng, {}, {}};
    b.features.resize(x.cols());
    std::iota(b.features.begin(), b.features.end(), 0);
    DecisionTree t;
    t.n_features_ = x.cols();
    b.build(sample_idx, 0, t.nodes_);
    return t;
  }

  /// Convenience overload: all rows, unit weights.
  static DecisionTree fit(const FeatureMatrix& x, std::span<const int> y, const TreeOptions& opt = {},
                          Rng* rng = nullptr) {
    check_training_set(x, y, false, "DecisionTree");
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    return fit(x, y, opt, std::move(idx), {}, rng);
  }

  int predict(std::span<const double> x) const override {
    int i = 0;
    while (nodes_[i].feature >= 0) {
      const Node& n = nodes_[i];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].label;
  }

  std::size_t n_features() const override { return n_features_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  int depth() const { return depth_from(0); }

 private:
  int depth_from(int i) const {
    if (nodes_[i].feature < 0) return 0;
    return 1 + std::max(depth_from(nodes_[i].left), depth_from(nodes_[i].right));
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -1.0;  // sum over children of (w0^2 + w1^2) / w; larger is purer
  };

  struct Builder {
    const FeatureMatrix& x;
    std::span<const int> y;
    const TreeOptions& opt;
    std::span<const double> weights;
    Rng* rng;
    std::vector<std::size_t> features;
    std::vector<std::pair<double, std::size_t>> scratch;

    double weight(std::size_t row) const { return weights.empty() ? 1.0 : weights[row]; }

    static double purity(double w0, double w1) {
      const double w = w0 + w1;
      return w > 0.0 ? (w0 * w0 + w1 * w1) / w : 0.0;
    }

    void consider_exact(std::span<const std::size_t> idx, int f, double tot0, double tot1, Split& best) {
      scratch.clear();
      for (std::size_t r : idx) scratch.emplace_back(x(r, static_cast<std::size_t>(f)), r);
      std::sort(scratch.begin(), scratch.end());
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        const std::size_t r = scratch[i].second;
        (y[r] == 1 ? l1 : l0) += weight(r);
        const double v = scratch[i].first, next = scratch[i + 1].first;
        if (!(v < next)) continue;
        const double score = purity(l0, l1) + purity(tot0 - l0, tot1 - l1);
        if (score > best.score) {
          double thr = 0.5 * (v + next);
          if (!(thr < next)) thr = v;
          best = {f, thr, score};
        }
      }
    }

    void consider_random(std::span<const std::size_t> idx, int f, double tot0, double tot1, Split& best) {
      double lo = x(idx[0], static_cast<std::size_t>(f)), hi = lo;
      for (std::size_t r : idx) {
        lo = std::min(lo, x(r, static_cast<std::size_t>(f)));
        hi = std::max(hi, x(r, static_cast<std::size_t>(f)));
      }
      if (!(lo < hi)) return;
      const double thr = std::uniform_real_distribution<double>(lo, hi)(*rng);
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t r : idx)
        if (x(r, static_cast<std::size_t>(f)) <= thr) (y[r] == 1 ? l1 : l0) += weight(r);
      const double score = purity(l0, l1) + purity(tot0 - l0, tot1 - l1);
      if (score > best.score) best = {f, thr, score};
    }

    void consider(std::span<const std::size_t> idx, int f, double tot0, double tot1, Split& best) {
      if (opt.random_thresholds) consider_random(idx, f, tot0, tot1, best);
      else consider_exact(idx, f, tot0, tot1, best);
    }

    Split best_split(std::span<const std::size_t> idx, double tot0, double tot1) {
      Split best;
      const std::size_t d = features.size();
      const std::size_t m = (opt.max_features == 0 || opt.max_features >= d) ? d : opt.max_features;
      if (m == d && !opt.random_thresholds) {
        for (std::size_t f = 0; f < d; ++f) consider(idx, static_cast<int>(f), tot0, tot1, best);
        return best;
      }
      // Partial Fisher-Yates: draw m features, examine them in ascending
      // order, and keep drawing one at a time while no valid split exists.
      std::size_t drawn = 0;
      auto draw = [&] {
        std::uniform_int_distribution<std::size_t> pick(drawn, d - 1);
        std::swap(features[drawn], features[pick(*rng)]);
        return features[drawn++];
      };
      std::vector<std::size_t> batch;
      for (std::size_t i = 0; i < m; ++i) batch.push_back(draw());
      std::sort(batch.begin(), batch.end());
      for (std::size_t f : batch) consider(idx, static_cast<int>(f), tot0, tot1, best);
      while (best.feature < 0 && drawn < d) consider(idx, static_cast<int>(draw()), tot0, tot1, best);
      return best;
    }

    int build(const std::vector<std::size_t>& idx, int depth, std::vector<Node>& nodes) {
      double w0 = 0.0, w1 = 0.0;
      bool has0 = false, has1 = false;
      for (std::size_t r : idx) {
        if (y[r] == 1) {
          w1 += weight(r);
          has1 = true;
        } else {
          w0 += weight(r);
          has0 = true;
        }
      }
      const int id = static_cast<int>(nodes.size());
      nodes.push_back({});
      nodes[id].label = w1 > w0 ? 1 : 0;

      const bool pure = !(has0 && has1);
      const bool too_small = idx.size() < std::max<std::size_t>(opt.min_samples_split, 2);
      const bool too_deep = opt.max_depth > 0 && depth >= opt.max_depth;
      if (pure || too_small || too_deep) return id;

      const Split s = best_split(idx, w0, w1);
      if (s.feature < 0) return id;

      std::vector<std::size_t> left, right;
      for (std::size_t r : idx)
        (x(r, static_cast<std::size_t>(s.feature)) <= s.threshold ? left : right).push_back(r);
      if (left.empty() || right.empty()) return id;

      nodes[id].feature = s.feature;
      nodes[id].threshold = s.threshold;
      const int l = build(left, depth + 1, nodes);
      const int r = build(right, depth + 1, nodes);
      nodes[id].left = l;
      nodes[id].right = r;
      return id;
    }
  };

  std::vector<Node> nodes_;
  std::size_t n_features_ = 0;
};

}  // namespace visenc::learners
