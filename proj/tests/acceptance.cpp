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
// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion, preceded by the measured values.
//
// Exit status is 0 when every check ran to completion, whatever the verdicts,
// so a known-failing criterion is reported rather than hidden behind a broken
// test run. Pass --strict to exit 1 on any FAIL. Exit 2 means a check could
// not run at all.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "visenc/hp_filter.hpp"
#include "visenc/pipeline.hpp"

namespace {

using namespace visenc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
  std::fflush(stdout);
}

struct Verdict {
  int id;
  std::string title;
  bool pass;
};

std::vector<Verdict> g_verdicts;

void verdict(int id, const std::string& title, bool pass) {
  std::printf("%s  criterion %d: %s\n\n", pass ? "PASS" : "FAIL", id, title.c_str());
  std::fflush(stdout);
  g_verdicts.push_back({id, title, pass});
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// ---- 1 ----

void enumeration() {
  const auto t0 = Clock::now();
  const auto squares = magic::enumerate_pan_magic();
  std::set<magic::Square5> all;
  std::size_t mass = 0;
  bool lines_ok = true;
  for (const auto& s : squares) {
    const auto orb = magic::orbit(s);
    mass += orb.size();
    all.insert(orb.begin(), orb.end());
    // Wrapped rows, columns and both diagonal families, summed directly.
    for (int i = 0; i < 5; ++i) {
      int row = 0, col = 0, diag = 0, anti = 0;
      for (int j = 0; j < 5; ++j) {
        row += s.at(i, j);
        col += s.at(j, i);
        diag += s.at(j, (i + j) % 5);
        anti += s.at(j, (i - j + 5) % 5);
      }
      lines_ok &= row == 65 && col == 65 && diag == 65 && anti == 65;
    }
  }
  const double secs = seconds_since(t0);
  note("squares = %zu (want 144)", squares.size());
  note("orbit mass = %zu, distinct squares in the union = %zu (want 28800)", mass, all.size());
  note("every wrapped line sums to 65: %s", lines_ok ? "yes" : "no");
  note("runtime %.2f s (limit 60 s)", secs);
  verdict(1, "enumeration exactness",
          squares.size() == 144 && mass == 28800 && all.size() == 28800 && lines_ok && secs < 60.0);
}

// ---- 2 ----

void table1() {
  const auto t0 = Clock::now();
  const auto corpus = pipeline::magic_corpus(42);
  std::array<std::array<double, 4>, 2> sum{}, sq{};
  std::array<int, 2> n{};
  for (const auto& ls : corpus) {
    const auto img = lanczos_resample(render_heatmap(ls.square), 2, 2, {3});
    const int l = static_cast<int>(ls.label);
    ++n[l];
    for (int c = 0; c < 4; ++c) {
      sum[l][c] += img.pixels()[c];
      sq[l][c] += img.pixels()[c] * img.pixels()[c];
    }
  }
  const std::array<double, 4> want = {0.50, 0.57, 0.60, 0.47};
  const char* cell[4] = {"(0,0)", "(0,1)", "(1,0)", "(1,1)"};
  bool means_ok = true, valid_std_ok = true, ratio_ok = true;
  for (int c = 0; c < 4; ++c) {
    std::array<double, 2> mean{}, sd{};
    for (int l = 0; l < 2; ++l) {
      mean[l] = sum[l][c] / n[l];
      sd[l] = std::sqrt(std::max(0.0, sq[l][c] / n[l] - mean[l] * mean[l]));
    }
    const bool m_ok = std::fabs(mean[1] - want[c]) <= 0.03;
    means_ok &= m_ok;
    valid_std_ok &= sd[1] <= 0.02;
    ratio_ok &= sd[0] >= 2.0 * sd[1];
    note("cell %s valid %.4f +- %.4f (want %.2f +- 0.03: %s)  invalid %.4f +- %.4f  std ratio %.2f", cell[c], mean[1],
         sd[1], want[c], m_ok ? "ok" : "off", mean[0], sd[0], sd[0] / sd[1]);
  }
  const double secs = seconds_since(t0);
  note("valid means within 0.03: %s; valid std <= 0.02: %s; invalid std >= 2x valid: %s", means_ok ? "yes" : "no",
       valid_std_ok ? "yes" : "no", ratio_ok ? "yes" : "no");
  note("runtime %.2f s (limit 10 s)", secs);
  verdict(2, "2x2 per-cell statistics", means_ok && valid_std_ok && ratio_ok && secs < 10.0);
}

// ---- CLI helpers for 3 and 8 ----

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + VISENC_CLI_PATH + "' " + args + " >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// resolution -> (mean, std) from fig3_data.csv.
std::map<std::string, std::pair<double, double>> read_fig3(const fs::path& p) {
  std::map<std::string, std::pair<double, double>> out;
  std::istringstream is(slurp(p));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    const auto a = line.find(','), b = line.find(',', a + 1);
    out[line.substr(0, a)] = {std::stod(line.substr(a + 1, b - a - 1)), std::stod(line.substr(b + 1))};
  }
  return out;
}

const fs::path g_work = fs::temp_directory_path() / "visenc_acceptance";

// ---- 3 ----

void fig3_shape() {
  const auto t0 = Clock::now();
  const int rc = run_cli("magic-sweep --seed 42 --out '" + (g_work / "run_a").string() + "'");
  const double secs = seconds_since(t0);
  if (rc != 0) {
    note("magic-sweep exited %d", rc);
    verdict(3, "resolution sweep shape", false);
    return;
  }
  const auto fig = read_fig3(g_work / "run_a" / "fig3_data.csv");
  for (const auto& key : {"numeric", "2", "3", "4", "5", "6", "7", "8", "9", "10", "28"})
    note("VOTE %-7s %.4f +- %.4f", key, fig.at(key).first, fig.at(key).second);

  const double numeric = fig.at("numeric").first;
  const bool numeric_ok = numeric >= 0.61 && numeric <= 0.81;
  note("numeric %.4f in [0.61, 0.81]: %s", numeric, numeric_ok ? "yes" : "no");

  double best_low = 0.0;
  for (const auto& key : {"2", "3", "4"}) best_low = std::max(best_low, fig.at(key).first);
  const bool low_ok = best_low >= 0.85;
  note("best of 2..4 = %.4f >= 0.85: %s", best_low, low_ok ? "yes" : "no");

  double lo = 1.0, hi = 0.0;
  for (const auto& key : {"6", "7", "8", "9", "10"}) {
    lo = std::min(lo, fig.at(key).first);
    hi = std::max(hi, fig.at(key).first);
  }
  const bool plateau_ok = hi - lo <= 0.05;
  note("6..10 spread = %.4f <= 0.05: %s", hi - lo, plateau_ok ? "yes" : "no");

  const auto [m5, s5] = fig.at("5");
  const double sn = fig.at("numeric").second;
  const double gap = std::fabs(numeric - m5);
  const bool close_ok = gap <= std::max(sn, s5);
  note("|numeric - 5x5| = %.4f <= max fold std %.4f: %s (within both stds: %s)", gap, std::max(sn, s5),
       close_ok ? "yes" : "no", gap <= std::min(sn, s5) ? "yes" : "no");
  note("runtime %.1f s (limit 900 s)", secs);
  verdict(3, "resolution sweep shape", numeric_ok && low_ok && plateau_ok && close_ok && secs < 900.0);
}

// ---- 4 ----

void qda_headline() {
  const auto t0 = Clock::now();
  const auto data = eval::magic_numeric_dataset(pipeline::magic_corpus(42));
  const std::vector<learners::LearnerSpec> specs = {{learners::Algorithm::QuadraticDiscriminant, {}, 0}};
  const auto report = eval::cross_validate(specs, data, 10, 42);
  const auto agg = report.find("magic", "numeric", "QuadraticDiscriminant");
  const double secs = seconds_since(t0);
  note("QDA numeric mean %.4f +- %.4f (want >= 0.90)", agg.mean, agg.std);
  note("runtime %.2f s (limit 30 s)", secs);
  verdict(4, "QDA on numeric squares", agg.mean >= 0.90 && secs < 30.0);
}

// ---- 5 and 6 ----

void market_criteria() {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.seed = 7;
  const auto res = pipeline::market_eval(cfg);
  const auto& rep = res.report;
  note("market-eval (seed 7, 669 weeks) ran in %.1f s", seconds_since(t0));

  const double fut_num = rep.find("future", "numeric", eval::kVoteName).mean;
  const double fut_rad = rep.find("future", "radar", eval::kVoteName).mean;
  note("future VOTE numeric %.4f, radar %.4f (want both in [0.42, 0.58])", fut_num, fut_rad);
  auto in_band = [](double v) { return v >= 0.42 && v <= 0.58; };
  verdict(5, "future labels carry no skill", in_band(fut_num) && in_band(fut_rad));

  double best_tree = 0.0;
  std::string best_name;
  for (const auto& a : rep.aggregates()) {
    if (a.representation != "recommended" || a.resolution != "numeric" || a.classifier == eval::kVoteName) continue;
    const auto alg = learners::parse_algorithm(a.classifier);
    if (!alg || !learners::is_tree_based(*alg)) continue;
    note("recommended numeric %-22s %.4f +- %.4f", a.classifier.c_str(), a.mean, a.std);
    if (a.mean > best_tree) {
      best_tree = a.mean;
      best_name = a.classifier;
    }
  }
  const double rec_num = rep.find("recommended", "numeric", eval::kVoteName).mean;
  const double rec_rad = rep.find("recommended", "radar", eval::kVoteName).mean;
  note("best tree learner on numeric: %s %.4f (want >= 0.95)", best_name.c_str(), best_tree);
  note("recommended VOTE numeric %.4f, radar %.4f (want both > 0.75); radar - numeric = %+.4f", rec_num, rec_rad,
       rec_rad - rec_num);

  // Diagnostic only: the same tree learners on the z-scaled indicators
  // without per-sample standardization, which keeps each indicator's level.
  const auto raw = market::synth_market(7);
  const auto snaps = market::compute_snapshots(raw);
  eval::Dataset levels{"market-numeric-levels", "recommended", "levels", {}, {}};
  for (const auto& s : snaps.snapshots) {
    const auto f = s.features();
    levels.add(std::vector<double>(f.begin(), f.end()), market::label_recommended(s));
  }
  std::vector<learners::LearnerSpec> trees;
  for (auto a : learners::kAllAlgorithms)
    if (learners::is_tree_based(a)) trees.push_back({a, {}, 0});
  const auto diag = eval::cross_validate(trees, levels, 10, 7);
  std::string line = "diagnostic, not part of the verdict: trees without per-sample standardization:";
  for (const auto& a : diag.aggregates())
    if (a.classifier != eval::kVoteName) line += " " + a.classifier + "=" + eval::format_fixed(a.mean, 3);
  note("%s", line.c_str());
  verdict(6, "recommended labels are learnable", best_tree >= 0.95 && rec_num > 0.75 && rec_rad > 0.75);
}

// ---- 7 ----

void numerical_kernels() {
  bool ok = true;
  auto check = [&](const char* what, double measured, double limit) {
    const bool pass = measured <= limit;
    ok &= pass;
    note("%-44s %.3e (limit %.0e) %s", what, measured, limit, pass ? "ok" : "EXCEEDED");
  };
  auto max_abs_diff = [](std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
  };

  const auto y = oracle::noisy_series(200, 2);
  check("HP lambda=0 identity", max_abs_diff(hp::hp_filter(y, {0.0}), y), 1e-9);
  std::vector<double> lin(200);
  for (std::size_t t = 0; t < lin.size(); ++t) lin[t] = -4.0 + 0.37 * static_cast<double>(t);
  double lin_err = 0.0;
  for (double lambda : {1.0, 100.0, 1e6, 1e12}) lin_err = std::max(lin_err, max_abs_diff(hp::hp_filter(lin, {lambda}), lin));
  check("HP linear fixed point", lin_err, 1e-9);
  check("HP lambda=1e12 vs OLS line", max_abs_diff(hp::hp_filter(y, {1e12}), oracle::ols_line(y)), 1e-3);

  double const_err = 0.0;
  for (int r = 1; r <= 40; ++r) {
    const auto out = lanczos_resample(GrayImage(28, 28, 0.5), r, r);
    for (double p : out.pixels()) const_err = std::max(const_err, std::fabs(p - 0.5));
  }
  check("Lanczos constant preservation", const_err, 1e-6);
  const auto img = oracle::random_image(3);
  check("Lanczos same-size identity", max_abs_diff(lanczos_resample(img, 28, 28).pixels(), img.pixels()), 1e-9);
  double oracle_err = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto src = oracle::random_image(seed);
    const int r = 2 + static_cast<int>(seed % 9);
    oracle_err = std::max(oracle_err, max_abs_diff(lanczos_resample(src, r, r).pixels(),
                                                   oracle::dense_lanczos(src, r, r, 3).pixels()));
  }
  check("Lanczos vs dense oracle, 10 seeded images", oracle_err, 1e-6);

  // MLP: central differences on every parameter of a small network.
  std::mt19937_64 rng(28);
  std::normal_distribution<double> z(0.0, 1.0);
  learners::FeatureMatrix x;
  learners::Labels labels;
  for (int i = 0; i < 20; ++i) {
    x.append_row(std::vector<double>{z(rng), z(rng), z(rng), z(rng)});
    labels.push_back(i % 2);
  }
  learners::MultilayerPerceptron net(4, {5, 4, 3}, 29);
  auto p = net.flat_params();
  for (double& v : p) v += 0.3 * z(rng);
  net.set_flat_params(p);
  const std::vector<std::size_t> batch = {0, 2, 4, 6, 11, 13, 15, 17};
  std::vector<double> grad, scratch;
  net.loss_and_gradient(x, labels, batch, grad);
  double worst = 0.0;
  constexpr double h = 1e-5;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto q = p;
    q[i] = p[i] + h;
    net.set_flat_params(q);
    const double up = net.loss_and_gradient(x, labels, batch, scratch);
    q[i] = p[i] - h;
    net.set_flat_params(q);
    const double down = net.loss_and_gradient(x, labels, batch, scratch);
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::fabs(fd - grad[i]) / std::max({std::fabs(fd), std::fabs(grad[i]), 1e-6}));
  }
  check("MLP gradient vs finite differences (rel.)", worst, 1e-4);

  double mean_err = 0.0, std_err = 0.0;
  std::uniform_real_distribution<double> u(-50.0, 80.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(2 + t % 800);
    for (double& e : v) e = u(rng);
    const auto s = eval::standardize_per_sample(v);
    double m = 0.0, ss = 0.0;
    for (double e : s) m += e;
    m /= static_cast<double>(s.size());
    for (double e : s) ss += (e - m) * (e - m);
    mean_err = std::max(mean_err, std::fabs(m));
    std_err = std::max(std_err, std::fabs(std::sqrt(ss / static_cast<double>(s.size())) - 1.0));
  }
  check("standardization |mean|", mean_err, 1e-9);
  check("standardization |std - 1|", std_err, 1e-9);
  verdict(7, "numerical kernels", ok);
}

// ---- 8 ----

void determinism() {
  const auto b = g_work / "run_b";
  const int rc = run_cli("magic-sweep --seed 42 --out '" + b.string() + "'");
  bool same = rc == 0;
  for (const char* name : {"magic_dataset.csv", "magic_folds.csv", "magic_aggregate.csv", "fig3_data.csv"}) {
    const auto pa = g_work / "run_a" / name, pb = b / name;
    const bool exists = fs::exists(pa) && fs::exists(pb);
    const bool eq = exists && slurp(pa) == slurp(pb);
    same &= eq;
    note("%-20s %s", name, !exists ? "missing" : eq ? "identical" : "DIFFERS");
  }
  verdict(8, "two magic-sweep runs are byte-identical", same);
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict |= std::strcmp(argv[i], "--strict") == 0;

  fs::remove_all(g_work);
  fs::create_directories(g_work);
  const std::vector<std::pair<int, std::function<void()>>> steps = {
      {1, enumeration}, {2, table1}, {3, fig3_shape}, {4, qda_headline}, {5, market_criteria}, {7, numerical_kernels},
      {8, determinism}};
  bool crashed = false;
  for (const auto& [id, step] : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("ERROR criterion %d could not run: %s\n", id, e.what());
      crashed = true;
    }
  }
  fs::remove_all(g_work);

  std::sort(g_verdicts.begin(), g_verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  int passed = 0;
  std::printf("summary:\n");
  for (const auto& v : g_verdicts) {
    std::printf("  %s  %d  %s\n", v.pass ? "PASS" : "FAIL", v.id, v.title.c_str());
    passed += v.pass;
  }
  std::printf("%d of %zu criteria pass\n", passed, g_verdicts.size());
  if (crashed) return 2;
  return strict && passed != static_cast<int>(g_verdicts.size()) ? 1 : 0;
}
