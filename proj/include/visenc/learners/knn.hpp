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
#include <utility>
#include <vector>

#include "visenc/learners/common.hpp"

namespace visenc::learners {

struct KnnOptions {
  int k = 5;
};

/// Euclidean k-nearest-neighbour majority vote. Equal distances are ordered
/// by training index; a tied vote goes to label 0.
class KNearestNeighbors : public Classifier {
 public:
  static KNearestNeighbors fit(const FeatureMatrix& x, std::span<const int> y, const KnnOptions& opt = {}) {
    check_training_set(x, y, false, "KNearestNeighbors");
    if (opt.k < 1) throw PreconditionError("KNearestNeighbors: k must be >= 1");
    KNearestNeighbors m;
    m.x_ = x;
    m.y_.assign(y.begin(), y.end());
    m.k_ = static_cast<std::size_t>(opt.k);
    return m;
  }

  int predict(std::span<const double> x) const override {
    std::vector<std::pair<double, std::size_t>> dist(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      auto xi = x_.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) s += (xi[j] - x[j]) * (xi[j] - x[j]);
      dist[i] = {s, i};
    }
    const std::size_t k = std::min(k_, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) ones += static_cast<std::size_t>(y_[dist[i].second]);
    return 2 * ones > k ? 1 : 0;
  }

  std::size_t n_features() const override { return x_.cols(); }

 private:
  FeatureMatrix x_;
  Labels y_;
  std::size_t k_ = 5;
};

}  // namespace visenc::learners
