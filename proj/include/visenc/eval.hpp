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
// Evaluation protocol: per-sample standardization, stratified k-fold
// cross-validation of every learner plus their hard vote, and the
// resolution sweep over downsampled heatmaps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "visenc/errors.hpp"
#include "visenc/lanczos.hpp"
#include "visenc/learners.hpp"
#include "visenc/magic_square.hpp"
#include "visenc/raster.hpp"

namespace visenc::eval {

using learners::FeatureMatrix;
using learners::Labels;
using learners::LearnerSpec;

/// Labelled feature vectors of one representation.
struct Dataset {
  std::string provenance;      // e.g. "magic-numeric", "magic-res-5", "market-radar-28"
  std::string representation;  // grouping key in reports, e.g. "magic"
  std::string resolution;      // "numeric" or the pixel grid side
  FeatureMatrix x;
  Labels y;

  std::size_t feature_len() const { return x.cols(); }
  std::size_t size() const { return x.rows(); }

  void add(std::span<const double> features, int label) {
    if (label != 0 && label != 1) throw PreconditionError("Dataset: labels must be 0 or 1");
    if (!x.empty() && features.size() != x.cols()) throw DimensionError("Dataset: feature length mismatch");
    x.append_row(features);
    y.push_back(label);
  }
};

/// (x - mean) / std with the population standard deviation.
inline std::vector<double> standardize_per_sample(std::span<const double> x) {
  if (x.size() < 2) throw PreconditionError("standardize_per_sample: need at least two values");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-12)) throw DegenerateSampleError("standardize_per_sample: sample has zero variance");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  return out;
}

struct FoldPlan {
  int k = 0;
  std::vector<int> fold_of;  // sample index -> fold id

  std::vector<std::size_t> members(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }
};

/// Stratified folds: indices are shuffled by `seed`, then dealt round-robin
/// class by class (class 0 first) with one running fold counter, so fold
/// sizes differ by at most one and so do per-fold class counts.
inline FoldPlan make_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw PreconditionError("make_folds: k must be >= 2");
  std::array<std::size_t, 2> count{};
  for (int l : labels) {
    if (l != 0 && l != 1) throw PreconditionError("make_folds: labels must be 0 or 1");
    ++count[l];
  }
  if (count[0] < static_cast<std::size_t>(k) || count[1] < static_cast<std::size_t>(k))
    throw DataError("make_folds: each class needs at least k members");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  FoldPlan plan{k, std::vector<int>(labels.size(), -1)};
  std::size_t next = 0;
  for (int cls : {0, 1})
    for (std::size_t idx : order)
      if (labels[idx] == cls) plan.fold_of[idx] = static_cast<int>(next++ % static_cast<std::size_t>(k));
  return plan;
}

inline double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw DimensionError("accuracy: length mismatch");
  if (predicted.empty()) throw PreconditionError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

inline constexpr const char* kVoteName = "VOTE";

struct FoldScore {
  std::string representation;
  std::string resolution;
  std::string classifier;
  int fold;
  double accuracy;
};

struct Aggregate {
  std::string representation;
  std::string resolution;
  std::string classifier;
  double mean;
  double std;  // population standard deviation across folds
  int folds;
};

/// Fold-level accuracies; aggregates are derived on demand.
class EvalReport {
 public:
  void add(FoldScore s) { rows_.push_back(std::move(s)); }
  void merge(const EvalReport& other) { rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end()); }
  const std::vector<FoldScore>& rows() const { return rows_; }

  /// One entry per (representation, resolution, classifier), in first-seen
  /// order.
  std::vector<Aggregate> aggregates() const {
    std::vector<Aggregate> out;
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> values;
    for (const auto& r : rows_) {
      auto key = std::make_tuple(r.representation, r.resolution, r.classifier);
      auto [it, inserted] = values.try_emplace(key);
      if (inserted) out.push_back({r.representation, r.resolution, r.classifier, 0.0, 0.0, 0});
      it->second.push_back(r.accuracy);
    }
    for (auto& a : out) {
      const auto& v = values.at(std::make_tuple(a.representation, a.resolution, a.classifier));
      const double n = static_cast<double>(v.size());
      a.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v) ss += (x - a.mean) * (x - a.mean);
      a.std = std::sqrt(ss / n);
      a.folds = static_cast<int>(v.size());
    }
    return out;
  }

  /// Aggregate for one key; throws if absent.
  Aggregate find(const std::string& representation, const std::string& resolution,
                 const std::string& classifier) const {
    for (const auto& a : aggregates())
      if (a.representation == representation && a.resolution == resolution && a.classifier == classifier) return a;
    throw PreconditionError("EvalReport: no rows for " + representation + "/" + resolution + "/" + classifier);
  }

 private:
  std::vector<FoldScore> rows_;
};

/// Seed for training cell (fold, spec) derived from the run seed.
inline std::uint64_t cell_seed(std::uint64_t seed, int fold, std::size_t spec_index, std::uint64_t spec_seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fold), static_cast<std::uint32_t>(spec_index),
                    static_cast<std::uint32_t>(spec_seed), static_cast<std::uint32_t>(spec_seed >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Trains every spec on k-1 folds and scores it, and the hard vote of all
/// specs, on the held-out fold. Emits (|specs| + 1) * k rows.
inline EvalReport cross_validate(const std::vector<LearnerSpec>& specs, const Dataset& data, int k,
                                 std::uint64_t seed) {
  if (specs.empty()) throw PreconditionError("cross_validate: no learners");
  if (data.y.size() != data.x.rows()) throw DimensionError("cross_validate: label count != sample count");
  const FoldPlan plan = make_folds(data.y, k, seed);

  EvalReport report;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) (plan.fold_of[i] == fold ? test_idx : train_idx).push_back(i);
    const FeatureMatrix train_x = data.x.select(train_idx);
    Labels train_y, test_y;
    for (std::size_t i : train_idx) train_y.push_back(data.y[i]);
    for (std::size_t i : test_idx) test_y.push_back(data.y[i]);

    std::vector<std::vector<int>> votes(test_idx.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
      LearnerSpec spec = specs[s];
      spec.seed = cell_seed(seed, fold, s, specs[s].seed);
      const std::string where = "fold " + std::to_string(fold) + ", " + std::string(learners::to_string(spec.algorithm));
      std::vector<int> pred(test_idx.size());
      try {
        const auto model = learners::fit(spec, train_x, train_y);
        for (std::size_t t = 0; t < test_idx.size(); ++t) pred[t] = model.predict(data.x.row(test_idx[t]));
      } catch (const PreconditionError& e) {
        throw PreconditionError(where + ": " + e.what());
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
      for (std::size_t t = 0; t < test_idx.size(); ++t) votes[t].push_back(pred[t]);
      report.add({data.representation, data.resolution, std::string(learners::to_string(spec.algorithm)), fold,
                  accuracy(pred, test_y)});
    }
    std::vector<int> vote_pred(test_idx.size());
    for (std::size_t t = 0; t < test_idx.size(); ++t) vote_pred[t] = learners::majority(votes[t]);
    report.add({data.representation, data.resolution, kVoteName, fold, accuracy(vote_pred, test_y)});
  }
  return report;
}

// ---- magic-square representations ----

inline constexpr const char* kNumericResolution = "numeric";

/// Raw cell values, per-sample standardized.
inline Dataset magic_numeric_dataset(const std::vector<magic::LabeledSquare>& squares) {
  Dataset d{"magic-numeric", "magic", kNumericResolution, {}, {}};
  for (const auto& ls : squares) {
    std::vector<double> raw(ls.square.cells().begin(), ls.square.cells().end());
    d.add(standardize_per_sample(raw), static_cast<int>(ls.label));
  }
  return d;
}

/// Heatmap intensities at `resolution` x `resolution` before standardization.
inline std::vector<double> magic_pixels(const magic::Square5& s, int resolution, const LanczosParams& lanczos) {
  const GrayImage base = render_heatmap(s);
  if (resolution == base.width()) return image_to_features(base);
  return image_to_features(lanczos_resample(base, resolution, resolution, lanczos));
}

/// 28x28 heatmap, Lanczos-resampled to resolution^2, flattened and
/// per-sample standardized.
inline Dataset magic_pixel_dataset(const std::vector<magic::LabeledSquare>& squares, int resolution,
                                   const LanczosParams& lanczos = {}) {
  if (resolution < 2 || resolution > kBaseResolution)
    throw PreconditionError("magic_pixel_dataset: resolution must be in [2, 28]");
  Dataset d{"magic-res-" + std::to_string(resolution), "magic", std::to_string(resolution), {}, {}};
  for (const auto& ls : squares) d.add(standardize_per_sample(magic_pixels(ls.square, resolution, lanczos)),
                                       static_cast<int>(ls.label));
  return d;
}

/// Cross-validates the numeric representation and one pixel representation
/// per requested resolution; one combined report.
inline EvalReport resolution_sweep(const std::vector<magic::LabeledSquare>& squares, const std::vector<int>& resolutions,
                                   const std::vector<LearnerSpec>& specs, int k, std::uint64_t seed,
                                   const LanczosParams& lanczos = {}) {
  for (int r : resolutions)
    if (r < 2 || r > kBaseResolution) throw PreconditionError("resolution_sweep: resolutions must lie in [2, 28]");
  EvalReport report = cross_validate(specs, magic_numeric_dataset(squares), k, seed);
  for (int r : resolutions) report.merge(cross_validate(specs, magic_pixel_dataset(squares, r, lanczos), k, seed));
  return report;
}

// ---- CSV output ----

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_fold_csv(std::ostream& os, const EvalReport& report) {
  os << "representation,resolution,classifier,fold,accuracy\n";
  for (const auto& r : report.rows())
    os << r.representation << ',' << r.resolution << ',' << r.classifier << ',' << r.fold << ','
       << format_fixed(r.accuracy) << '\n';
}

inline void write_aggregate_csv(std::ostream& os, const EvalReport& report) {
  os << "representation,resolution,classifier,mean,std\n";
  for (const auto& a : report.aggregates())
    os << a.representation << ',' << a.resolution << ',' << a.classifier << ',' << format_fixed(a.mean) << ','
       << format_fixed(a.std) << '\n';
}

}  // namespace visenc::eval
