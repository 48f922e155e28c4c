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
// Separable Lanczos resampling. When shrinking, the kernel is widened by the
// scale ratio so that it also acts as the anti-aliasing low-pass filter.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "visenc/errors.hpp"
#include "visenc/image.hpp"

namespace visenc {

struct LanczosParams {
  int window_a = 3;
};

/// Normalized sinc: sin(pi x) / (pi x), with sinc(0) = 1.
inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

/// L(x) = sinc(x) sinc(x/a) on |x| < a, zero elsewhere.
inline double lanczos_kernel(double x, int a) {
  if (std::fabs(x) >= a) return 0.0;
  return sinc(x) * sinc(x / a);
}

/// Contribution of one source sample to one output sample.
struct Tap {
  int index;  // already clamped into [0, src_len)
  double weight;
};

/// Per-output-sample taps along one axis; weights of each output sum to 1.
/// Output sample `o` is centred at source coordinate (o + 0.5) * src/dst.
inline std::vector<std::vector<Tap>> lanczos_taps(int src_len, int dst_len, int a) {
  if (src_len < 1 || dst_len < 1) throw PreconditionError("lanczos_taps: lengths must be positive");
  if (a < 1) throw PreconditionError("lanczos_taps: window_a must be >= 1");
  const double scale = static_cast<double>(src_len) / dst_len;
  const double stretch = std::max(scale, 1.0);
  const double support = a * stretch;

  std::vector<std::vector<Tap>> taps(dst_len);
  for (int o = 0; o < dst_len; ++o) {
    const double center = (o + 0.5) * scale;
    const int first = static_cast<int>(std::floor(center - support));
    const int last = static_cast<int>(std::ceil(center + support));
    double total = 0.0;
    auto& row = taps[o];
    for (int j = first; j <= last; ++j) {
      const double w = lanczos_kernel((j + 0.5 - center) / stretch, a);
      if (w == 0.0) continue;
      row.push_back({std::clamp(j, 0, src_len - 1), w});
      total += w;
    }
    for (auto& t : row) t.weight /= total;
  }
  return taps;
}

/// Resamples `img` to out_w x out_h, horizontal pass first. Output is
/// clamped to [0, 1].
inline GrayImage lanczos_resample(const GrayImage& img, int out_w, int out_h,
                                  const LanczosParams& params = {}) {
  if (out_w < 1 || out_h < 1) throw PreconditionError("lanczos_resample: target dimensions must be >= 1");
  const auto tx = lanczos_taps(img.width(), out_w, params.window_a);
  const auto ty = lanczos_taps(img.height(), out_h, params.window_a);

  std::vector<double> horiz(static_cast<std::size_t>(out_w) * img.height(), 0.0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (const Tap& t : tx[x]) acc += t.weight * img(t.index, y);
      horiz[static_cast<std::size_t>(y) * out_w + x] = acc;
    }

  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (const Tap& t : ty[y]) acc += t.weight * horiz[static_cast<std::size_t>(t.index) * out_w + x];
      out(x, y) = std::clamp(acc, 0.0, 1.0);
    }
  return out;
}

}  // namespace visenc
