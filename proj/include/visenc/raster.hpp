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
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "visenc/errors.hpp"
#include "visenc/image.hpp"
#include "visenc/magic_square.hpp"

namespace visenc {

inline constexpr int kBaseResolution = 28;

/// 28x28 heatmap of a square: every pixel shows its cell's value / 25.
/// 28 is not a multiple of 5, so cells map to 6- or 5-pixel blocks via
/// floor(p * 5 / 28).
inline GrayImage render_heatmap(const magic::Square5& square) {
  constexpr int n = kBaseResolution;
  GrayImage img(n, n);
  for (int py = 0; py < n; ++py)
    for (int px = 0; px < n; ++px)
      img(px, py) = square.at(py * magic::kOrder / n, px * magic::kOrder / n) /
                    static_cast<double>(magic::kCells);
  return img;
}

inline constexpr int kRadarAxes = 5;

struct RadarConfig {
  int resolution = kBaseResolution;
  double radial_min = -2.0;  // z-units at the centre
  double radial_max = 2.0;   // z-units at the rim
  double first_axis_angle_deg = 90.0;  // counterclockwise from +x

  void validate() const {
    if (resolution < 3) throw PreconditionError("RadarConfig: resolution must be >= 3");
    if (!(radial_min < radial_max)) throw PreconditionError("RadarConfig: radial_min must be < radial_max");
  }
};

struct Point2 {
  double x;
  double y;
};

/// Vertices of the radar polygon in image coordinates (x right, y down,
/// pixel (i, j) centred at (i + 0.5, j + 0.5)). Axis k points at
/// first_axis_angle - 72k degrees.
inline std::array<Point2, kRadarAxes> radar_vertices(std::span<const double, kRadarAxes> features,
                                                     const RadarConfig& cfg) {
  cfg.validate();
  const double center = cfg.resolution / 2.0;
  const double rim = cfg.resolution / 2.0 - 1.0;
  std::array<Point2, kRadarAxes> v{};
  for (int k = 0; k < kRadarAxes; ++k) {
    const double f = std::clamp(features[k], cfg.radial_min, cfg.radial_max);
    const double r = (f - cfg.radial_min) / (cfg.radial_max - cfg.radial_min) * rim;
    const double theta = (cfg.first_axis_angle_deg - 72.0 * k) * std::numbers::pi / 180.0;
    v[k] = {center + r * std::cos(theta), center - r * std::sin(theta)};
  }
  return v;
}

/// Even-odd scanline fill sampled at pixel centres. Crossings are counted
/// on half-open edge spans [ymin, ymax) so shared vertices count once.
inline GrayImage fill_polygon(std::span<const Point2> poly, int width, int height) {
  GrayImage img(width, height, 0.0);
  std::vector<double> xs;
  for (int py = 0; py < height; ++py) {
    const double yc = py + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % poly.size()];
      if (p.y == q.y) continue;
      const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
      if (yc < lo || yc >= hi) continue;
      xs.push_back(p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int from = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int to = std::min(width, static_cast<int>(std::ceil(xs[i + 1] - 0.5)));
      for (int px = from; px < to; ++px) img(px, py) = 1.0;
    }
  }
  return img;
}

/// Filled black-and-white radar chart of five z-scaled indicators.
inline GrayImage render_radar(std::span<const double, kRadarAxes> features, const RadarConfig& cfg = {}) {
  const auto verts = radar_vertices(features, cfg);
  return fill_polygon(verts, cfg.resolution, cfg.resolution);
}

/// Row-major flatten.
inline std::vector<double> image_to_features(const GrayImage& img) {
  return {img.pixels().begin(), img.pixels().end()};
}

}  // namespace visenc
