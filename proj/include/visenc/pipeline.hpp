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
// End-to-end runs behind the command-line tool. Every run computes first and
// writes afterwards; each file goes to a temporary name and is renamed into
// place, so a failed run leaves no partial outputs.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "visenc/config.hpp"
#include "visenc/eval.hpp"
#include "visenc/image.hpp"
#include "visenc/lanczos.hpp"
#include "visenc/magic_square.hpp"
#include "visenc/market.hpp"

namespace visenc::pipeline {

/// Named file contents, written together once computation has finished.
class OutputSet {
 public:
  std::ostringstream& file(const std::string& name) { return files_[name]; }

  /// Writes every file under `dir` (created if missing) and returns the
  /// paths in name order.
  std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : files_) {
      const auto target = dir / name;
      auto tmp = target;
      tmp += ".tmp";
      {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw DataError("cannot open " + tmp.string() + " for writing");
        os << content.str();
        if (!os.flush()) throw DataError("failed writing " + tmp.string());
      }
      std::filesystem::rename(tmp, target);
      written.push_back(target);
    }
    return written;
  }

 private:
  std::map<std::string, std::ostringstream> files_;
};

/// Constants that shape the results but are not configurable.
inline nlohmann::json design_constants() {
  nlohmann::json j;
  j["canonical_form"] = "lexicographic minimum over 25 translations x 8 dihedral maps";
  j["corruption"] = "one swap of two distinct cells per canonical square";
  j["heatmap_mapping"] = "cell = floor(pixel * 5 / 28), intensity = value / 25";
  j["lanczos_edges"] = "clamp (edge replication), weights renormalized, output clipped to [0, 1]";
  j["standardization"] = "per sample, population standard deviation";
  j["folds"] = "stratified, shuffled once by seed, class 0 dealt before class 1";
  j["fold_std"] = "population standard deviation across folds";
  j["threshold_tie"] = "score exactly 0.5 (or 0 margin) predicts label 0";
  j["vote_tie"] = "label 0";
  j["split_tie"] = "lowest feature index, then lowest threshold";
  j["econ_lag_weeks"] = market::kEconLagWeeks;
  j["price_lag_weeks"] = market::kPriceLagWeeks;
  j["price_momentum"] = "log change";
  j["zscale"] = "full sample, population standard deviation";
  j["future_tie"] = "unchanged close labels Sell";
  j["radar_axes"] = "value, positions_inv, flows, econ_mom, price_mom; first at 90 degrees, clockwise";
  j["rng"] = "std::mt19937_64";
  return j;
}

inline std::string dump_manifest(const std::string& command, const RunConfig& cfg, nlohmann::json extra = {}) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = cfg.to_json();
  j["design"] = design_constants();
  if (!extra.is_null()) j["outputs"] = std::move(extra);
  return j.dump(2) + "\n";
}

inline LanczosParams lanczos_params(const RunConfig& cfg) { return {cfg.lanczos_window}; }

/// The 288-sample corpus for `seed`.
inline std::vector<magic::LabeledSquare> magic_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return magic::build_magic_dataset(rng);
}

/// Resolutions actually swept: the configured ones plus the base grid,
/// ascending and without duplicates.
inline std::vector<int> sweep_resolutions(const RunConfig& cfg) {
  std::vector<int> r = cfg.resolutions;
  r.push_back(cfg.base_resolution);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

/// resolution,mean,std of the VOTE rows, numeric first.
inline void write_fig3_csv(std::ostream& os, const eval::EvalReport& report) {
  os << "resolution,mean,std\n";
  for (const auto& a : report.aggregates())
    if (a.classifier == eval::kVoteName)
      os << a.resolution << ',' << eval::format_fixed(a.mean) << ',' << eval::format_fixed(a.std) << '\n';
}

struct MagicSweepResult {
  eval::EvalReport report;
  OutputSet files;
};

inline MagicSweepResult magic_sweep(const RunConfig& cfg) {
  cfg.validate();
  const auto corpus = magic_corpus(cfg.seed);
  MagicSweepResult res;
  res.report = eval::resolution_sweep(corpus, sweep_resolutions(cfg), cfg.specs(), cfg.cv_folds, cfg.seed,
                                      lanczos_params(cfg));
  magic::write_magic_csv(res.files.file("magic_dataset.csv"), corpus, cfg.seed);
  eval::write_fold_csv(res.files.file("magic_folds.csv"), res.report);
  eval::write_aggregate_csv(res.files.file("magic_aggregate.csv"), res.report);
  write_fig3_csv(res.files.file("fig3_data.csv"), res.report);
  res.files.file("manifest_magic_sweep.json")
      << dump_manifest("magic-sweep", cfg,
                       {{"samples", corpus.size()}, {"swept_resolutions", sweep_resolutions(cfg)}});
  return res;
}

/// Raw market inputs from the configured source.
inline market::RawMarketInputs load_market(const RunConfig& cfg) {
  if (cfg.market_source == "synthetic") return market::synth_market(cfg.seed, cfg.market_weeks);
  const std::string path = cfg.market_source.substr(4);
  std::ifstream is(path);
  if (!is) throw DataError("cannot open market csv '" + path + "'");
  return market::read_market_csv(is);
}

/// Market reports key rows by (labeling, representation); the generic report
/// columns carry them as (representation, resolution).
inline void write_market_fold_csv(std::ostream& os, const eval::EvalReport& report) {
  os << "labeling,representation,classifier,fold,accuracy\n";
  for (const auto& r : report.rows())
    os << r.representation << ',' << r.resolution << ',' << r.classifier << ',' << r.fold << ','
       << eval::format_fixed(r.accuracy) << '\n';
}

inline void write_fig4_csv(std::ostream& os, const eval::EvalReport& report) {
  os << "labeling,representation,classifier,mean,std\n";
  for (const auto& a : report.aggregates())
    os << a.representation << ',' << a.resolution << ',' << a.classifier << ',' << eval::format_fixed(a.mean) << ','
       << eval::format_fixed(a.std) << '\n';
}

struct MarketEvalResult {
  eval::EvalReport report;
  OutputSet files;
};

inline MarketEvalResult market_eval(const RunConfig& cfg) {
  cfg.validate();
  const auto raw = load_market(cfg);
  const hp::HpParams hp_params{cfg.hp_lambda};
  MarketEvalResult res;
  nlohmann::json sizes;
  for (auto labeling : {market::Labeling::Future, market::Labeling::Recommended})
    for (auto rep : {market::Representation::Numeric, market::Representation::Radar}) {
      const auto data = market::build_market_dataset(raw, labeling, rep, cfg.radar(), hp_params);
      sizes[data.provenance + "-" + std::string(market::to_string(labeling))] = data.size();
      res.report.merge(eval::cross_validate(cfg.specs(), data, cfg.cv_folds, cfg.seed));
    }
  market::write_snapshot_csv(res.files.file("market_snapshots.csv"), market::compute_snapshots(raw, hp_params));
  write_market_fold_csv(res.files.file("market_folds.csv"), res.report);
  write_fig4_csv(res.files.file("fig4_data.csv"), res.report);
  res.files.file("manifest_market_eval.json")
      << dump_manifest("market-eval", cfg, {{"raw_weeks", raw.weeks()}, {"dataset_sizes", sizes}});
  return res;
}

enum class RenderDataset { Magic, Market };

/// `<dataset>_<index>_<label>.pgm` at the base resolution plus
/// `<dataset>_<index>_<label>_r<res>.pgm` per configured resolution. Market
/// images carry the Recommended label.
inline OutputSet render(const RunConfig& cfg, RenderDataset which, std::size_t index) {
  cfg.validate();
  OutputSet files;
  GrayImage base(1, 1);
  std::string stem;
  if (which == RenderDataset::Magic) {
    const auto corpus = magic_corpus(cfg.seed);
    if (index >= corpus.size())
      throw PreconditionError("render: magic index must be < " + std::to_string(corpus.size()));
    base = render_heatmap(corpus[index].square);
    stem = "magic_" + std::to_string(index) + "_" + std::to_string(static_cast<int>(corpus[index].label));
  } else {
    const auto snaps = market::compute_snapshots(load_market(cfg), hp::HpParams{cfg.hp_lambda});
    if (index >= snaps.snapshots.size())
      throw PreconditionError("render: market index must be < " + std::to_string(snaps.snapshots.size()));
    const auto f = snaps.snapshots[index].features();
    base = render_radar(std::span<const double, market::kIndicators>(f), cfg.radar());
    stem = "market_" + std::to_string(index) + "_" + std::to_string(market::label_recommended(snaps.snapshots[index]));
  }
  write_pgm(files.file(stem + ".pgm"), base);
  for (int r : cfg.resolutions) {
    if (r == base.width()) continue;
    write_pgm(files.file(stem + "_r" + std::to_string(r) + ".pgm"), lanczos_resample(base, r, r, lanczos_params(cfg)));
  }
  return files;
}

inline OutputSet market_synth(const RunConfig& cfg) {
  cfg.validate();
  OutputSet files;
  market::write_market_csv(files.file("market_raw.csv"), market::synth_market(cfg.seed, cfg.market_weeks));
  files.file("manifest_market_synth.json") << dump_manifest("market-synth", cfg);
  return files;
}

}  // namespace visenc::pipeline
