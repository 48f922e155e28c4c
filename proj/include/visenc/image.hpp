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
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "visenc/errors.hpp"

namespace visenc {

/// Row-major grayscale image with intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(int width, int height, double fill = 0.0)
      : width_(width), height_(height), pixels_(checked_size(width, height), fill) {}

  GrayImage(int width, int height, std::vector<double> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_size(width, height))
      throw DimensionError("GrayImage: pixel count does not match width*height");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  double& operator()(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  double operator()(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  bool operator==(const GrayImage&) const = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w < 1 || h < 1) throw PreconditionError("GrayImage: dimensions must be positive");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// 8-bit quantization used by every exported image: round(i * 255), clamped.
inline std::uint8_t to_byte(double intensity) {
  const double v = std::round(std::clamp(intensity, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(v);
}

/// Binary PGM (P5), maxval 255.
inline void write_pgm(std::ostream& os, const GrayImage& img) {
  os << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::string bytes(img.size(), '\0');
  for (std::size_t i = 0; i < img.size(); ++i) bytes[i] = static_cast<char>(to_byte(img.pixels()[i]));
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Reads a P5 image with maxval 255; comments are not supported.
inline GrayImage read_pgm(std::istream& is) {
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  is >> magic >> w >> h >> maxval;
  if (!is || magic != "P5" || maxval != 255) throw DataError("read_pgm: expected a P5 header with maxval 255");
  is.get();  // single whitespace byte after the header
  std::vector<char> raw(static_cast<std::size_t>(w) * h);
  is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (is.gcount() != static_cast<std::streamsize>(raw.size())) throw DataError("read_pgm: truncated pixel data");
  std::vector<double> px(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) px[i] = static_cast<unsigned char>(raw[i]) / 255.0;
  return GrayImage(w, h, std::move(px));
}

}  // namespace visenc
