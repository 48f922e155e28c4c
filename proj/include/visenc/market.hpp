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
// Weekly market-health indicators: raw series in, five z-scaled indicators
// and two labelling rules out. Also a seeded synthetic stand-in for the raw
// inputs and CSV ingestion/export.

#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visenc/errors.hpp"
#include "visenc/eval.hpp"
#include "visenc/hp_filter.hpp"
#include "visenc/raster.hpp"

namespace visenc::market {

using Date = std::chrono::sys_days;

inline std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

/// Parses YYYY-MM-DD; throws DataError on anything else.
inline Date parse_date(std::string_view s) {
  auto field = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    const char* first = s.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc() || ptr != first + len) throw DataError("bad date '" + std::string(s) + "'");
    return v;
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw DataError("bad date '" + std::string(s) + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{field(0, 4)},
                                        std::chrono::month{static_cast<unsigned>(field(5, 2))},
                                        std::chrono::day{static_cast<unsigned>(field(8, 2))}};
  if (!ymd.ok()) throw DataError("bad date '" + std::string(s) + "'");
  return Date{ymd};
}

/// Values on strictly increasing dates.
class WeeklySeries {
 public:
  WeeklySeries() = default;
  WeeklySeries(std::vector<Date> dates, std::vector<double> values) : dates_(std::move(dates)), values_(std::move(values)) {
    if (dates_.size() != values_.size()) throw DimensionError("WeeklySeries: dates and values differ in length");
    for (std::size_t i = 1; i < dates_.size(); ++i)
      if (!(dates_[i - 1] < dates_[i])) throw DataError("WeeklySeries: dates must be strictly increasing");
    for (double v : values_)
      if (!std::isfinite(v)) throw DataError("WeeklySeries: non-finite value");
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Entries [first, size()).
  WeeklySeries drop_front(std::size_t first) const {
    if (first > size()) throw PreconditionError("WeeklySeries: drop past the end");
    return {{dates_.begin() + static_cast<std::ptrdiff_t>(first), dates_.end()},
            {values_.begin() + static_cast<std::ptrdiff_t>(first), values_.end()}};
  }

  /// Sub-series covering dates in [from, to].
  WeeklySeries between(Date from, Date to) const {
    std::vector<Date> d;
    std::vector<double> v;
    for (std::size_t i = 0; i < size(); ++i)
      if (dates_[i] >= from && dates_[i] <= to) {
        d.push_back(dates_[i]);
        v.push_back(values_[i]);
      }
    return {std::move(d), std::move(v)};
  }

  friend bool operator==(const WeeklySeries&, const WeeklySeries&) = default;

 private:
  std::vector<Date> dates_;
  std::vector<double> values_;
};

inline void require_aligned(const WeeklySeries& a, const WeeklySeries& b, const char* who) {
  if (a.dates() != b.dates()) throw DataError(std::string(who) + ": series are not on the same dates");
}

/// Raw weekly inputs on one shared date axis. irr[t] and vol[t] hold one
/// value per asset class for week t.
struct RawMarketInputs {
  std::vector<Date> dates;
  std::vector<double> eq_pos, ust_pos, eq_flows, bond_flows, pmi, sp_close;
  std::vector<std::vector<double>> irr, vol;

  std::size_t weeks() const { return dates.size(); }

  void validate() const {
    const std::size_t n = dates.size();
    for (const auto* s : {&eq_pos, &ust_pos, &eq_flows, &bond_flows, &pmi, &sp_close})
      if (s->size() != n) throw DimensionError("RawMarketInputs: series length differs from the date axis");
    if (irr.size() != n || vol.size() != n) throw DimensionError("RawMarketInputs: irr/vol length differs from the date axis");
    WeeklySeries(dates, sp_close);  // checks ordering and finiteness
    for (std::size_t t = 0; t < n; ++t)
      if (irr[t].size() != vol[t].size()) throw DimensionError("RawMarketInputs: irr/vol asset counts differ");
  }

  WeeklySeries series(const std::vector<double>& v) const { return {dates, v}; }
};

// ---- indicators ----

/// Speculative net positions, inverted: -(equity - treasury).
inline WeeklySeries indicator_positions(const WeeklySeries& eq, const WeeklySeries& ust) {
  require_aligned(eq, ust, "indicator_positions");
  std::vector<double> out(eq.size());
  for (std::size_t i = 0; i < eq.size(); ++i) out[i] = -(eq[i] - ust[i]);
  return {eq.dates(), std::move(out)};
}

/// Week-over-week change of the HP trend of (equity - bond) flows. The first
/// week has no predecessor and is dropped.
inline WeeklySeries indicator_flows(const WeeklySeries& eq_flows, const WeeklySeries& bond_flows,
                                    const hp::HpParams& params = {}) {
  require_aligned(eq_flows, bond_flows, "indicator_flows");
  if (eq_flows.size() < 4) throw DataError("indicator_flows: need at least four weeks");
  std::vector<double> diff(eq_flows.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = eq_flows[i] - bond_flows[i];
  const auto trend = hp::hp_filter(diff, params);
  std::vector<double> out(trend.size() - 1);
  for (std::size_t i = 1; i < trend.size(); ++i) out[i - 1] = trend[i] - trend[i - 1];
  return {{eq_flows.dates().begin() + 1, eq_flows.dates().end()}, std::move(out)};
}

inline constexpr std::size_t kEconLagWeeks = 8;    // two months
inline constexpr std::size_t kPriceLagWeeks = 26;  // six months

/// pmi[t] - pmi[t - 8].
inline WeeklySeries indicator_econ_momentum(const WeeklySeries& pmi) {
  if (pmi.size() <= kEconLagWeeks) throw DataError("indicator_econ_momentum: series too short");
  std::vector<double> out(pmi.size() - kEconLagWeeks);
  for (std::size_t t = kEconLagWeeks; t < pmi.size(); ++t) out[t - kEconLagWeeks] = pmi[t] - pmi[t - kEconLagWeeks];
  return {{pmi.dates().begin() + kEconLagWeeks, pmi.dates().end()}, std::move(out)};
}

/// ln(sp[t]) - ln(sp[t - 26]).
inline WeeklySeries indicator_price_momentum(const WeeklySeries& sp) {
  if (sp.size() <= kPriceLagWeeks) throw DataError("indicator_price_momentum: series too short");
  for (double v : sp.values())
    if (!(v > 0.0)) throw DataError("indicator_price_momentum: prices must be positive");
  std::vector<double> out(sp.size() - kPriceLagWeeks);
  for (std::size_t t = kPriceLagWeeks; t < sp.size(); ++t)
    out[t - kPriceLagWeeks] = std::log(sp[t]) - std::log(sp[t - kPriceLagWeeks]);
  return {{sp.dates().begin() + kPriceLagWeeks, sp.dates().end()}, std::move(out)};
}

/// OLS slope of irr on vol across asset classes.
inline double indicator_value(std::span<const double> irr, std::span<const double> vol) {
  if (irr.size() != vol.size()) throw DimensionError("indicator_value: irr and vol differ in length");
  if (irr.size() < 2) throw PreconditionError("indicator_value: need at least two assets");
  const double n = static_cast<double>(irr.size());
  const double vm = std::accumulate(vol.begin(), vol.end(), 0.0) / n;
  const double rm = std::accumulate(irr.begin(), irr.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < irr.size(); ++i) {
    sxy += (vol[i] - vm) * (irr[i] - rm);
    sxx += (vol[i] - vm) * (vol[i] - vm);
  }
  if (!(sxx > 0.0)) throw DataError("indicator_value: volatilities are all equal");
  return sxy / sxx;
}

/// Full-sample z-score with the population standard deviation.
inline WeeklySeries zscale(const WeeklySeries& x) {
  if (x.size() < 2) throw PreconditionError("zscale: need at least two values");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.values().begin(), x.values().end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x.values()) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-12)) throw DegenerateSampleError("zscale: series has zero variance");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  return {x.dates(), std::move(out)};
}

// ---- snapshots and labels ----

inline constexpr int kIndicators = 5;

/// One week of the five z-scaled indicators.
struct MarketSnapshot {
  Date date;
  double value = 0.0;
  double positions_inv = 0.0;
  double flows = 0.0;
  double econ_mom = 0.0;
  double price_mom = 0.0;

  /// Radar axis order.
  std::array<double, kIndicators> features() const { return {value, positions_inv, flows, econ_mom, price_mom}; }
};

/// Buy (1) iff the index closes higher next week; an unchanged close is Sell.
inline int label_future(const WeeklySeries& sp, std::size_t t) {
  if (t + 1 >= sp.size()) throw PreconditionError("label_future: no following week");
  return sp[t + 1] > sp[t] ? 1 : 0;
}

/// Buy (1) iff at least three indicators are strictly above 0.5.
inline int label_recommended(const MarketSnapshot& s) {
  int above = 0;
  for (double f : s.features()) above += f > 0.5 ? 1 : 0;
  return above >= 3 ? 1 : 0;
}

/// Snapshots plus the S&P close on the same dates.
struct SnapshotSeries {
  std::vector<MarketSnapshot> snapshots;
  WeeklySeries sp_close;
};

/// Computes every indicator, z-scales each over its own valid range and
/// aligns them on the dates where all five exist.
inline SnapshotSeries compute_snapshots(const RawMarketInputs& raw, const hp::HpParams& hp_params = {}) {
  raw.validate();
  if (raw.weeks() < kPriceLagWeeks + 2)
    throw DataError("compute_snapshots: need at least " + std::to_string(kPriceLagWeeks + 2) + " weeks of history");

  std::vector<double> value(raw.weeks());
  for (std::size_t t = 0; t < raw.weeks(); ++t) value[t] = indicator_value(raw.irr[t], raw.vol[t]);

  const std::array<WeeklySeries, kIndicators> z = {
      zscale(raw.series(value)),
      zscale(indicator_positions(raw.series(raw.eq_pos), raw.series(raw.ust_pos))),
      zscale(indicator_flows(raw.series(raw.eq_flows), raw.series(raw.bond_flows), hp_params)),
      zscale(indicator_econ_momentum(raw.series(raw.pmi))),
      zscale(indicator_price_momentum(raw.series(raw.sp_close))),
  };
  const Date first = z[4].dates().front();  // the longest warm-up
  const Date last = raw.dates.back();
  std::array<WeeklySeries, kIndicators> a;
  for (int k = 0; k < kIndicators; ++k) a[k] = z[k].between(first, last);

  SnapshotSeries out{{}, raw.series(raw.sp_close).between(first, last)};
  for (std::size_t i = 0; i < a[0].size(); ++i)
    out.snapshots.push_back({a[0].dates()[i], a[0][i], a[1][i], a[2][i], a[3][i], a[4][i]});
  return out;
}

enum class Labeling { Future, Recommended };
enum class Representation { Numeric, Radar };

inline std::string_view to_string(Labeling l) { return l == Labeling::Future ? "future" : "recommended"; }
inline std::string_view to_string(Representation r) { return r == Representation::Numeric ? "numeric" : "radar"; }

/// Labelled, per-sample standardized market dataset. Future labelling drops
/// the final week, which has no successor.
inline eval::Dataset build_market_dataset(const RawMarketInputs& raw, Labeling labeling, Representation representation,
                                          const RadarConfig& radar = {}, const hp::HpParams& hp_params = {}) {
  const SnapshotSeries s = compute_snapshots(raw, hp_params);
  const std::string rep(to_string(representation));
  eval::Dataset d{"market-" + rep + (representation == Representation::Radar ? "-" + std::to_string(radar.resolution) : ""),
                  std::string(to_string(labeling)), rep, {}, {}};
  const std::size_t n = labeling == Labeling::Future ? s.snapshots.size() - 1 : s.snapshots.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& snap = s.snapshots[i];
    const int label = labeling == Labeling::Future ? label_future(s.sp_close, i) : label_recommended(snap);
    const auto f = snap.features();
    std::vector<double> x = representation == Representation::Numeric
                                ? std::vector<double>(f.begin(), f.end())
                                : image_to_features(render_radar(std::span<const double, kIndicators>(f), radar));
    d.add(eval::standardize_per_sample(x), label);
  }
  return d;
}

// ---- synthetic stand-in ----

inline constexpr std::size_t kSyntheticAssets = 5;

/// Deterministic synthetic raw inputs, weekly from 2006-06-23. The index is a
/// geometric random walk (drift 0.0015, volatility 0.02 per week); positions,
/// flows and PMI are AR(1) processes with persistence 0.95 around fixed
/// levels; the five assets' irr sit on a risk-return line whose slope is
/// itself AR(1).
inline RawMarketInputs synth_market(std::uint64_t seed, std::size_t n_weeks = 669) {
  if (n_weeks < 40) throw PreconditionError("synth_market: need at least 40 weeks");
  constexpr double kPersistence = 0.95;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Ar1 {
    double level, innovation_sd, dev = 0.0;
  };
  Ar1 eq{60000.0, 8000.0}, ust{20000.0, 6000.0}, eq_flow{1.0, 1.5}, bond_flow{1.5, 1.0}, pmi{52.0, 0.6},
      slope{0.35, 0.02};
  const std::array<double, kSyntheticAssets> base_vol = {3.0, 6.0, 10.0, 15.0, 20.0};

  RawMarketInputs raw;
  const Date start = Date{std::chrono::year{2006} / std::chrono::June / 23};
  double log_sp = std::log(1250.0);
  for (std::size_t t = 0; t < n_weeks; ++t) {
    raw.dates.push_back(start + std::chrono::days{7 * static_cast<long>(t)});
    for (Ar1* p : {&eq, &ust, &eq_flow, &bond_flow, &pmi, &slope})
      p->dev = kPersistence * p->dev + p->innovation_sd * normal(rng);
    if (t > 0) log_sp += 0.0015 + 0.02 * normal(rng);

    raw.eq_pos.push_back(eq.level + eq.dev);
    raw.ust_pos.push_back(ust.level + ust.dev);
    raw.eq_flows.push_back(eq_flow.level + eq_flow.dev);
    raw.bond_flows.push_back(bond_flow.level + bond_flow.dev);
    raw.pmi.push_back(pmi.level + pmi.dev);
    raw.sp_close.push_back(std::exp(log_sp));

    std::vector<double> irr(kSyntheticAssets), vol(kSyntheticAssets);
    for (std::size_t a = 0; a < kSyntheticAssets; ++a) {
      vol[a] = base_vol[a] * (1.0 + 0.05 * normal(rng));
      irr[a] = 1.0 + (slope.level + slope.dev) * vol[a] + 0.2 * normal(rng);
    }
    raw.irr.push_back(std::move(irr));
    raw.vol.push_back(std::move(vol));
  }
  return raw;
}

// ---- CSV ----

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw DataError("bad number '" + std::string(s) + "'");
  return v;
}

inline void write_number(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  os << buf;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 7> kRawColumns = {"date",       "eq_pos", "ust_pos", "eq_flows",
                                                                "bond_flows", "pmi",    "sp_close"};

/// Reads the ingestion format: the seven core columns, then irr_1..irr_k and
/// vol_1..vol_k. The value indicator needs the irr/vol block, so a file
/// without it is rejected. Errors name the 1-based line.
inline RawMarketInputs read_market_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("market csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  for (std::size_t i = 0; i < kRawColumns.size(); ++i)
    if (i >= header.size() || header[i] != kRawColumns[i])
      throw DataError("market csv line 1: expected column '" + std::string(kRawColumns[i]) + "'");
  const std::size_t extra = header.size() - kRawColumns.size();
  if (extra == 0 || extra % 2 != 0)
    throw DataError("market csv line 1: irr_1..irr_k and vol_1..vol_k columns are required");
  const std::size_t assets = extra / 2;
  for (std::size_t a = 0; a < assets; ++a) {
    if (header[kRawColumns.size() + a] != "irr_" + std::to_string(a + 1) ||
        header[kRawColumns.size() + assets + a] != "vol_" + std::to_string(a + 1))
      throw DataError("market csv line 1: expected irr_1..irr_" + std::to_string(assets) + " then vol_1..vol_" +
                      std::to_string(assets));
  }

  RawMarketInputs raw;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto f = detail::split_csv_line(line);
      if (f.size() != header.size())
        throw DataError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
      raw.dates.push_back(parse_date(f[0]));
      raw.eq_pos.push_back(detail::parse_number(f[1]));
      raw.ust_pos.push_back(detail::parse_number(f[2]));
      raw.eq_flows.push_back(detail::parse_number(f[3]));
      raw.bond_flows.push_back(detail::parse_number(f[4]));
      raw.pmi.push_back(detail::parse_number(f[5]));
      raw.sp_close.push_back(detail::parse_number(f[6]));
      std::vector<double> irr(assets), vol(assets);
      for (std::size_t a = 0; a < assets; ++a) {
        irr[a] = detail::parse_number(f[kRawColumns.size() + a]);
        vol[a] = detail::parse_number(f[kRawColumns.size() + assets + a]);
      }
      raw.irr.push_back(std::move(irr));
      raw.vol.push_back(std::move(vol));
      if (raw.dates.size() > 1 && !(raw.dates[raw.dates.size() - 2] < raw.dates.back()))
        throw DataError("dates must be strictly increasing");
    } catch (const DataError& e) {
      throw DataError("market csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (raw.dates.empty()) throw DataError("market csv: no data rows");
  return raw;
}

inline void write_market_csv(std::ostream& os, const RawMarketInputs& raw) {
  raw.validate();
  const std::size_t assets = raw.irr.empty() ? 0 : raw.irr.front().size();
  for (std::size_t i = 0; i < kRawColumns.size(); ++i) os << (i ? "," : "") << kRawColumns[i];
  for (std::size_t a = 0; a < assets; ++a) os << ",irr_" << a + 1;
  for (std::size_t a = 0; a < assets; ++a) os << ",vol_" << a + 1;
  os << '\n';
  for (std::size_t t = 0; t < raw.weeks(); ++t) {
    os << format_date(raw.dates[t]);
    for (const auto* s : {&raw.eq_pos, &raw.ust_pos, &raw.eq_flows, &raw.bond_flows, &raw.pmi, &raw.sp_close}) {
      os << ',';
      detail::write_number(os, (*s)[t]);
    }
    if (raw.irr[t].size() != assets) throw DimensionError("write_market_csv: asset count changes over time");
    for (const auto* block : {&raw.irr[t], &raw.vol[t]})
      for (double v : *block) {
        os << ',';
        detail::write_number(os, v);
      }
    os << '\n';
  }
}

/// One row per snapshot with both labels; the last week's future label is
/// left empty.
inline void write_snapshot_csv(std::ostream& os, const SnapshotSeries& s) {
  os << "date,value,positions_inv,flows,econ_mom,price_mom,label_future,label_recommended\n";
  for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
    const auto& snap = s.snapshots[i];
    os << format_date(snap.date);
    for (double f : snap.features()) os << ',' << eval::format_fixed(f);
    os << ',';
    if (i + 1 < s.snapshots.size()) os << label_future(s.sp_close, i);
    os << ',' << label_recommended(snap) << '\n';
  }
}

}  // namespace visenc::market
