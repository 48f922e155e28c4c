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

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "visenc/errors.hpp"
#include "visenc/learners.hpp"
#include "visenc/raster.hpp"

namespace visenc {

/// Every knob of a run. Loaded from a flat `key = value` file; `#` starts a
/// comment. Lists are comma separated.
struct RunConfig {
  std::uint64_t seed = 42;
  std::vector<int> resolutions = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  int base_resolution = kBaseResolution;
  int lanczos_window = 3;
  int cv_folds = 10;
  std::vector<std::string> classifiers;  // empty selects all twelve
  double radar_min = -2.0;
  double radar_max = 2.0;
  std::string out = "results";
  std::string market_source = "synthetic";  // or csv:PATH
  std::size_t market_weeks = 669;
  double hp_lambda = 100.0;

  void validate() const {
    if (base_resolution != kBaseResolution)
      throw PreconditionError("config: base_resolution is fixed at " + std::to_string(kBaseResolution));
    for (int r : resolutions)
      if (r < 2 || r > base_resolution) throw PreconditionError("config: resolutions must lie in [2, base_resolution]");
    if (cv_folds < 2) throw PreconditionError("config: cv_folds must be >= 2");
    if (lanczos_window < 1) throw PreconditionError("config: lanczos_window must be >= 1");
    if (!(radar_min < radar_max)) throw PreconditionError("config: radar_min must be < radar_max");
    if (!(hp_lambda >= 0.0)) throw PreconditionError("config: hp_lambda must be >= 0");
    if (market_weeks < 40) throw PreconditionError("config: market_weeks must be >= 40");
    if (market_source != "synthetic" && !(market_source.starts_with("csv:") && market_source.size() > 4))
      throw PreconditionError("config: market_source must be 'synthetic' or 'csv:PATH'");
    (void)specs();
  }

  std::vector<learners::LearnerSpec> specs() const {
    if (classifiers.empty()) return learners::default_suite(0);
    std::vector<learners::LearnerSpec> out;
    for (const auto& tag : classifiers) {
      const auto a = learners::parse_algorithm(tag);
      if (!a) throw PreconditionError("config: unknown classifier '" + tag + "'");
      out.push_back({*a, {}, 0});
    }
    return out;
  }

  RadarConfig radar() const { return {kBaseResolution, radar_min, radar_max, 90.0}; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["resolutions"] = resolutions;
    j["base_resolution"] = base_resolution;
    j["lanczos_window"] = lanczos_window;
    j["cv_folds"] = cv_folds;
    nlohmann::json names = nlohmann::json::array();
    for (const auto& s : specs()) names.push_back(std::string(learners::to_string(s.algorithm)));
    j["classifiers"] = names;
    j["radar_min"] = radar_min;
    j["radar_max"] = radar_max;
    j["out"] = out;
    j["market_source"] = market_source;
    j["market_weeks"] = market_weeks;
    j["hp_lambda"] = hp_lambda;
    return j;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_scalar(std::string_view key, std::string_view v) {
  v = trim(v);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw PreconditionError("config: bad value '" + std::string(v) + "' for " + std::string(key));
  return out;
}

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Applies one key to `cfg`. Unknown keys are errors so typos do not pass
/// silently.
inline void apply_config_key(RunConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_scalar;
  value = detail::trim(value);
  if (key == "seed") {
    cfg.seed = parse_scalar<std::uint64_t>(key, value);
  } else if (key == "resolutions") {
    cfg.resolutions.clear();
    for (auto item : detail::split_list(value)) cfg.resolutions.push_back(parse_scalar<int>(key, item));
  } else if (key == "base_resolution") {
    cfg.base_resolution = parse_scalar<int>(key, value);
  } else if (key == "lanczos_window") {
    cfg.lanczos_window = parse_scalar<int>(key, value);
  } else if (key == "cv_folds") {
    cfg.cv_folds = parse_scalar<int>(key, value);
  } else if (key == "classifiers") {
    cfg.classifiers.clear();
    for (auto item : detail::split_list(value)) cfg.classifiers.emplace_back(item);
  } else if (key == "radar_min") {
    cfg.radar_min = parse_scalar<double>(key, value);
  } else if (key == "radar_max") {
    cfg.radar_max = parse_scalar<double>(key, value);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "market_source") {
    cfg.market_source = std::string(value);
  } else if (key == "market_weeks") {
    cfg.market_weeks = parse_scalar<std::size_t>(key, value);
  } else if (key == "hp_lambda") {
    cfg.hp_lambda = parse_scalar<double>(key, value);
  } else {
    throw PreconditionError("config: unknown key '" + std::string(key) + "'");
  }
}

inline RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view v(line);
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = detail::trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw PreconditionError("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_config_key(cfg, detail::trim(v.substr(0, eq)), v.substr(eq + 1));
    } catch (const PreconditionError& e) {
      throw PreconditionError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace visenc
