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
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "visenc/errors.hpp"

namespace visenc::learners {

/// Dense row-major sample matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    FeatureMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw DimensionError("FeatureMatrix: ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.cols_));
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  void append_row(std::span<const double> x) {
    if (rows_ == 0 && cols_ == 0) cols_ = x.size();
    if (x.size() != cols_) throw DimensionError("FeatureMatrix: row length mismatch");
    data_.insert(data_.end(), x.begin(), x.end());
    ++rows_;
  }

  /// Copy of the given rows, in the given order (duplicates allowed).
  FeatureMatrix select(std::span<const std::size_t> idx) const {
    FeatureMatrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Binary class labels, 0 or 1.
using Labels = std::vector<int>;

inline void require_finite(std::span<const double> x, const char* who) {
  for (double v : x)
    if (!std::isfinite(v)) throw DataError(std::string(who) + ": non-finite feature value");
}

/// Shape, label and finiteness checks shared by every learner's fit.
inline void check_training_set(const FeatureMatrix& x, std::span<const int> y, bool need_both_classes,
                               const char* who) {
  if (x.empty()) throw PreconditionError(std::string(who) + ": empty training set");
  if (x.rows() != y.size()) throw DimensionError(std::string(who) + ": label count != sample count");
  bool seen[2] = {false, false};
  for (int label : y) {
    if (label != 0 && label != 1) throw PreconditionError(std::string(who) + ": labels must be 0 or 1");
    seen[label] = true;
  }
  if (need_both_classes && !(seen[0] && seen[1]))
    throw DataError(std::string(who) + ": training set contains a single class");
  for (std::size_t i = 0; i < x.rows(); ++i) require_finite(x.row(i), who);
}

/// Interface every fitted learner implements.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int predict(std::span<const double> x) const = 0;
  virtual std::size_t n_features() const = 0;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace visenc::learners
