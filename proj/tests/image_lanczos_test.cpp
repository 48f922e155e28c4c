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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "visenc/image.hpp"
#include "visenc/lanczos.hpp"
#include "visenc/magic_square.hpp"
#include "visenc/raster.hpp"
#include "oracles.hpp"

namespace {

using namespace visenc;

using oracle::dense_lanczos;
using oracle::random_image;

TEST(GrayImage, RejectsMismatchedPixelCount) {
  EXPECT_THROW(GrayImage(2, 2, std::vector<double>(3)), DimensionError);
  EXPECT_THROW(GrayImage(0, 2), PreconditionError);
}

TEST(GrayImage, FlattenIsRowMajor) {
  const GrayImage img(2, 2, {0.1, 0.2, 0.3, 0.4});
  EXPECT_DOUBLE_EQ(img(1, 0), 0.2);
  EXPECT_DOUBLE_EQ(img(0, 1), 0.3);
  const auto f = image_to_features(img);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(GrayImage(2, 2, f), img);
}

TEST(Pgm, HeaderAndBytes) {
  const GrayImage img(3, 2, {0.0, 0.5, 1.0, 0.04, 0.2, 0.999});
  std::ostringstream os;
  write_pgm(os, img);
  const std::string s = os.str();
  ASSERT_EQ(s.substr(0, 11), "P5\n3 2\n255\n");
  ASSERT_EQ(s.size(), 11u + 6u);
  const auto* b = reinterpret_cast<const unsigned char*>(s.data() + 11);
  EXPECT_EQ(b[0], 0);
  EXPECT_EQ(b[1], 128);  // round(127.5)
  EXPECT_EQ(b[2], 255);
  EXPECT_EQ(b[3], 10);  // round(10.2)
  EXPECT_EQ(b[4], 51);
  EXPECT_EQ(b[5], 255);

  std::istringstream is(s);
  const GrayImage back = read_pgm(is);
  ASSERT_EQ(back.width(), 3);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(to_byte(back.pixels()[i]), b[i]);
}

TEST(Lanczos, KernelBasics) {
  EXPECT_DOUBLE_EQ(lanczos_kernel(0.0, 3), 1.0);
  for (int k = 1; k < 3; ++k) EXPECT_NEAR(lanczos_kernel(k, 3), 0.0, 1e-15);
  EXPECT_EQ(lanczos_kernel(3.0, 3), 0.0);
  EXPECT_EQ(lanczos_kernel(-3.5, 3), 0.0);
  EXPECT_NEAR(lanczos_kernel(0.5, 3), lanczos_kernel(-0.5, 3), 1e-15);
}

TEST(Lanczos, TapWeightsSumToOne) {
  for (int dst : {1, 2, 3, 5, 7, 10, 28, 40})
    for (const auto& taps : lanczos_taps(28, dst, 3)) {
      double s = 0.0;
      for (const auto& t : taps) {
        s += t.weight;
        EXPECT_GE(t.index, 0);
        EXPECT_LT(t.index, 28);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Lanczos, ConstantImageIsPreserved) {
  const GrayImage img(28, 28, 0.5);
  for (int r : {1, 2, 3, 5, 7, 10, 14, 28, 33}) {
    const auto out = lanczos_resample(img, r, r);
    for (double p : out.pixels()) EXPECT_NEAR(p, 0.5, 1e-6) << "size " << r;
  }
}

TEST(Lanczos, SameSizeIsIdentity) {
  const auto img = random_image(3);
  const auto out = lanczos_resample(img, 28, 28);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(out.pixels()[i], img.pixels()[i], 1e-9);
}

TEST(Lanczos, SingleBrightPixelMatchesDenseOracle) {
  GrayImage img(28, 28, 0.0);
  img(13, 9) = 1.0;
  const auto got = lanczos_resample(img, 7, 7);
  const auto want = dense_lanczos(img, 7, 7, 3);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.pixels()[i], want.pixels()[i], 1e-6);
}

TEST(Lanczos, SeededImagesMatchDenseOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = random_image(seed);
    const int r = 2 + static_cast<int>(seed % 9);
    const auto got = lanczos_resample(img, r, r + 1);
    const auto want = dense_lanczos(img, r, r + 1, 3);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.pixels()[i], want.pixels()[i], 1e-6) << "seed " << seed;
  }
}

TEST(Lanczos, OtherWindowsMatchDenseOracle) {
  const auto img = random_image(77);
  for (int a : {1, 2, 4}) {
    const auto got = lanczos_resample(img, 5, 5, {a});
    const auto want = dense_lanczos(img, 5, 5, a);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.pixels()[i], want.pixels()[i], 1e-6) << "a " << a;
  }
}

TEST(Lanczos, OutputStaysInUnitInterval) {
  GrayImage img(28, 28, 0.0);
  for (int y = 0; y < 28; ++y)
    for (int x = 14; x < 28; ++x) img(x, y) = 1.0;  // hard edge rings
  for (int r : {3, 9, 20, 40}) {
    const auto out = lanczos_resample(img, r, r);
    for (double p : out.pixels()) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Lanczos, DownsamplingKeepsHeatmapMeans) {
  std::mt19937_64 rng(42);
  const auto data = magic::build_magic_dataset(rng);
  for (std::size_t i = 0; i < data.size(); i += 7) {
    const auto base = render_heatmap(data[i].square);
    double m0 = 0.0;
    for (double p : base.pixels()) m0 += p;
    m0 /= static_cast<double>(base.size());
    for (int r = 2; r <= 10; ++r) {
      const auto out = lanczos_resample(base, r, r);
      double m = 0.0;
      for (double p : out.pixels()) m += p;
      EXPECT_NEAR(m / static_cast<double>(out.size()), m0, 0.02) << "sample " << i << " res " << r;
    }
  }
}

TEST(Lanczos, RejectsZeroTarget) {
  const GrayImage img(4, 4);
  EXPECT_THROW(lanczos_resample(img, 0, 3), PreconditionError);
  EXPECT_THROW(lanczos_resample(img, 3, 0), PreconditionError);
  EXPECT_THROW(lanczos_resample(img, 3, 3, {0}), PreconditionError);
}

}  // namespace
