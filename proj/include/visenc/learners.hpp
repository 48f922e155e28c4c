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
// The classifier suite behind one uniform fit/predict surface, plus the
// hard-voting aggregator.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "visenc/learners/common.hpp"
#include "visenc/learners/ensembles.hpp"
#include "visenc/learners/gaussian.hpp"
#include "visenc/learners/knn.hpp"
#include "visenc/learners/linear.hpp"
#include "visenc/learners/mlp.hpp"
#include "visenc/learners/tree.hpp"

namespace visenc::learners {

enum class Algorithm {
  LogisticRegression,
  GaussianNaiveBayes,
  LinearDiscriminant,
  QuadraticDiscriminant,
  KNearestNeighbors,
  LinearSVM,
  DecisionTree,
  RandomForest,
  ExtraRandomizedForest,
  Bagging,
  AdaBoost,
  MultilayerPerceptron,
};

inline constexpr std::array<Algorithm, 12> kAllAlgorithms = {
    Algorithm::LogisticRegression, Algorithm::GaussianNaiveBayes, Algorithm::LinearDiscriminant,
    Algorithm::QuadraticDiscriminant, Algorithm::KNearestNeighbors, Algorithm::LinearSVM,
    Algorithm::DecisionTree, Algorithm::RandomForest, Algorithm::ExtraRandomizedForest,
    Algorithm::Bagging, Algorithm::AdaBoost, Algorithm::MultilayerPerceptron,
};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::LogisticRegression: return "LogisticRegression";
    case Algorithm::GaussianNaiveBayes: return "GaussianNaiveBayes";
    case Algorithm::LinearDiscriminant: return "LinearDiscriminant";
    case Algorithm::QuadraticDiscriminant: return "QuadraticDiscriminant";
    case Algorithm::KNearestNeighbors: return "KNearestNeighbors";
    case Algorithm::LinearSVM: return "LinearSVM";
    case Algorithm::DecisionTree: return "DecisionTree";
    case Algorithm::RandomForest: return "RandomForest";
    case Algorithm::ExtraRandomizedForest: return "ExtraRandomizedForest";
    case Algorithm::Bagging: return "Bagging";
    case Algorithm::AdaBoost: return "AdaBoost";
    case Algorithm::MultilayerPerceptron: return "MultilayerPerceptron";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view tag) {
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == tag) return a;
  return std::nullopt;
}

inline bool is_tree_based(Algorithm a) {
  return a == Algorithm::DecisionTree || a == Algorithm::RandomForest || a == Algorithm::ExtraRandomizedForest ||
         a == Algorithm::Bagging || a == Algorithm::AdaBoost;
}

using Hyperparameters = std::map<std::string, double>;

/// Every key an algorithm accepts, with its default.
inline Hyperparameters default_hyperparameters(Algorithm a) {
  switch (a) {
    case Algorithm::LogisticRegression: return {{"l2", 1.0}, {"max_iter", 1000}, {"tol", 1e-4}};
    case Algorithm::GaussianNaiveBayes: return {{"var_smoothing", 1e-9}};
    case Algorithm::LinearDiscriminant: return {{"ridge", 1e-6}};
    case Algorithm::QuadraticDiscriminant: return {{"ridge", 1e-6}};
    case Algorithm::KNearestNeighbors: return {{"k", 5}};
    case Algorithm::LinearSVM: return {{"l2", 1.0}, {"epochs", 1000}};
    case Algorithm::DecisionTree: return {{"max_depth", 0}, {"min_samples_split", 2}};
    case Algorithm::RandomForest: return {{"n_trees", 100}};
    case Algorithm::ExtraRandomizedForest: return {{"n_trees", 100}};
    case Algorithm::Bagging: return {{"n_estimators", 10}};
    case Algorithm::AdaBoost: return {{"n_estimators", 50}, {"error_floor", 1e-10}};
    case Algorithm::MultilayerPerceptron:
      return {{"hidden_units", 32}, {"hidden_layers", 3}, {"learning_rate", 1e-3}, {"epochs", 200},
              {"batch_size", 200}};
  }
  return {};
}

struct LearnerSpec {
  Algorithm algorithm = Algorithm::LogisticRegression;
  Hyperparameters hyperparameters;  // overrides; unspecified keys take defaults
  std::uint64_t seed = 0;

  /// Defaults merged with overrides. Throws on a key the algorithm does not
  /// define.
  Hyperparameters resolved() const {
    Hyperparameters h = default_hyperparameters(algorithm);
    for (const auto& [k, v] : hyperparameters) {
      if (!h.contains(k))
        throw PreconditionError("LearnerSpec: unknown hyperparameter '" + k + "' for " +
                                std::string(to_string(algorithm)));
      h[k] = v;
    }
    return h;
  }
};

/// The default suite: all twelve algorithms with default hyperparameters.
inline std::vector<LearnerSpec> default_suite(std::uint64_t seed = 0) {
  std::vector<LearnerSpec> out;
  for (Algorithm a : kAllAlgorithms) out.push_back({a, {}, seed});
  return out;
}

class TrainedModel {
 public:
  TrainedModel(LearnerSpec spec, std::shared_ptr<const Classifier> impl, double training_accuracy)
      : spec_(std::move(spec)), impl_(std::move(impl)), training_accuracy_(training_accuracy) {}

  /// Throws DimensionError on a length mismatch and DataError on non-finite
  /// input.
  int predict(std::span<const double> x) const {
    if (x.size() != impl_->n_features())
      throw DimensionError(std::string(to_string(spec_.algorithm)) + ": expected " +
                           std::to_string(impl_->n_features()) + " features, got " + std::to_string(x.size()));
    require_finite(x, "predict");
    return impl_->predict(x);
  }

  const LearnerSpec& spec() const { return spec_; }
  std::size_t n_features() const { return impl_->n_features(); }
  double training_accuracy() const { return training_accuracy_; }
  const Classifier& classifier() const { return *impl_; }

  /// Summary for logs and manifests; the fitted state itself is not exported.
  nlohmann::json summary() const {
    nlohmann::json j;
    j["algorithm"] = std::string(to_string(spec_.algorithm));
    j["hyperparameters"] = spec_.resolved();
    j["seed"] = spec_.seed;
    j["training_accuracy"] = training_accuracy_;
    return j;
  }

 private:
  LearnerSpec spec_;
  std::shared_ptr<const Classifier> impl_;
  double training_accuracy_;
};

namespace detail {

inline std::size_t as_count(double v, const char* key) {
  if (!(v >= 1.0)) throw PreconditionError(std::string("hyperparameter '") + key + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

inline std::shared_ptr<const Classifier> fit_impl(const LearnerSpec& spec, const FeatureMatrix& x,
                                                  std::span<const int> y) {
  const Hyperparameters h = spec.resolved();
  switch (spec.algorithm) {
    case Algorithm::LogisticRegression:
      return std::make_shared<LinearModel>(
          fit_logistic(x, y, {h.at("l2"), static_cast<int>(h.at("max_iter")), h.at("tol")}));
    case Algorithm::GaussianNaiveBayes:
      return std::make_shared<GaussianNaiveBayes>(GaussianNaiveBayes::fit(x, y, {h.at("var_smoothing")}));
    case Algorithm::LinearDiscriminant:
      return std::make_shared<LinearDiscriminant>(LinearDiscriminant::fit(x, y, {h.at("ridge")}));
    case Algorithm::QuadraticDiscriminant:
      return std::make_shared<QuadraticDiscriminant>(QuadraticDiscriminant::fit(x, y, {h.at("ridge")}));
    case Algorithm::KNearestNeighbors:
      return std::make_shared<KNearestNeighbors>(
          KNearestNeighbors::fit(x, y, {static_cast<int>(as_count(h.at("k"), "k"))}));
    case Algorithm::LinearSVM:
      return std::make_shared<LinearModel>(fit_linear_svm(x, y, {h.at("l2"), static_cast<int>(h.at("epochs"))}));
    case Algorithm::DecisionTree: {
      check_training_set(x, y, true, "DecisionTree");
      TreeOptions opt;
      opt.max_depth = static_cast<int>(h.at("max_depth"));
      opt.min_samples_split = as_count(h.at("min_samples_split"), "min_samples_split");
      return std::make_shared<DecisionTree>(DecisionTree::fit(x, y, opt));
    }
    case Algorithm::RandomForest:
      check_training_set(x, y, true, "RandomForest");
      return std::make_shared<TreeEnsemble>(fit_random_forest(x, y, as_count(h.at("n_trees"), "n_trees"), spec.seed));
    case Algorithm::ExtraRandomizedForest:
      check_training_set(x, y, true, "ExtraRandomizedForest");
      return std::make_shared<TreeEnsemble>(fit_extra_trees(x, y, as_count(h.at("n_trees"), "n_trees"), spec.seed));
    case Algorithm::Bagging:
      check_training_set(x, y, true, "Bagging");
      return std::make_shared<TreeEnsemble>(
          fit_bagging(x, y, as_count(h.at("n_estimators"), "n_estimators"), spec.seed));
    case Algorithm::AdaBoost:
      return std::make_shared<AdaBoost>(
          AdaBoost::fit(x, y, {as_count(h.at("n_estimators"), "n_estimators"), h.at("error_floor")}));
    case Algorithm::MultilayerPerceptron: {
      MlpOptions opt;
      opt.hidden.assign(as_count(h.at("hidden_layers"), "hidden_layers"),
                        static_cast<int>(as_count(h.at("hidden_units"), "hidden_units")));
      opt.learning_rate = h.at("learning_rate");
      opt.epochs = static_cast<int>(as_count(h.at("epochs"), "epochs"));
      opt.batch_size = as_count(h.at("batch_size"), "batch_size");
      return std::make_shared<MultilayerPerceptron>(MultilayerPerceptron::fit(x, y, spec.seed, opt));
    }
  }
  throw PreconditionError("fit: unsupported algorithm");
}

}  // namespace detail

/// Trains one learner. Every algorithm except k-nearest-neighbours requires
/// both classes in `y`.
inline TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& x, std::span<const int> y) {
  auto impl = detail::fit_impl(spec, x, y);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) hits += impl->predict(x.row(i)) == y[i] ? 1 : 0;
  return {spec, std::move(impl), static_cast<double>(hits) / static_cast<double>(x.rows())};
}

/// Majority of member labels; an exact tie yields 0.
inline int hard_vote(std::span<const TrainedModel> members, std::span<const double> x) {
  if (members.empty()) throw PreconditionError("hard_vote: empty ensemble");
  std::size_t ones = 0;
  for (const auto& m : members) ones += static_cast<std::size_t>(m.predict(x));
  return 2 * ones > members.size() ? 1 : 0;
}

/// Same rule applied to votes that were already collected.
inline int majority(std::span<const int> votes) {
  if (votes.empty()) throw PreconditionError("majority: no votes");
  std::size_t ones = 0;
  for (int v : votes) ones += static_cast<std::size_t>(v == 1);
  return 2 * ones > votes.size() ? 1 : 0;
}

}  // namespace visenc::learners
