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
// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 internal error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "visenc/config.hpp"
#include "visenc/pipeline.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> source;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "flat key = value config file");
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  cmd->add_option("--source", f.source, "market data: synthetic or csv:PATH (overrides the config)");
}

visenc::RunConfig load_config(const CommonFlags& f) {
  visenc::RunConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream is(f.config_path);
    if (!is) throw visenc::PreconditionError("cannot open config '" + f.config_path + "'");
    cfg = visenc::parse_config(is);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.source) cfg.market_source = *f.source;
  cfg.validate();
  return cfg;
}

void report(const std::vector<std::filesystem::path>& written) {
  for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular-to-image encodings: magic-square and market-health classification experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* sweep = app.add_subcommand("magic-sweep", "cross-validate the suite on numeric and downsampled heatmaps");
  auto* market_eval = app.add_subcommand("market-eval", "cross-validate the suite on market numeric and radar data");
  auto* render = app.add_subcommand("render", "write PGM images of one sample");
  auto* synth = app.add_subcommand("market-synth", "write the synthetic raw market CSV");
  for (auto* cmd : {sweep, market_eval, render, synth}) add_common(cmd, flags);

  std::string dataset = "magic";
  std::size_t index = 0;
  render->add_option("--dataset", dataset, "magic or market")->check(CLI::IsMember({"magic", "market"}));
  render->add_option("--index", index, "sample index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  // Stage names make failures traceable to the step that raised them.
  std::string stage = "config";
  try {
    const visenc::RunConfig cfg = load_config(flags);
    namespace pl = visenc::pipeline;
    if (sweep->parsed()) {
      stage = "magic-sweep";
      auto res = pl::magic_sweep(cfg);
      stage = "write";
      report(res.files.commit(cfg.out));
    } else if (market_eval->parsed()) {
      stage = "market-eval";
      auto res = pl::market_eval(cfg);
      stage = "write";
      report(res.files.commit(cfg.out));
    } else if (render->parsed()) {
      stage = "render";
      auto files = pl::render(cfg, dataset == "magic" ? pl::RenderDataset::Magic : pl::RenderDataset::Market, index);
      stage = "write";
      report(files.commit(cfg.out));
    } else if (synth->parsed()) {
      stage = "market-synth";
      auto files = pl::market_synth(cfg);
      stage = "write";
      report(files.commit(cfg.out));
    }
    return 0;
  } catch (const visenc::PreconditionError& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const visenc::DataError& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error [" << stage << "]: " << e.what() << '\n';
    return kExitInternal;
  }
}
