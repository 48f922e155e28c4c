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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "visenc/magic_square.hpp"

namespace {

using visenc::PreconditionError;
using namespace visenc::magic;
using Grid = std::array<std::array<int, 5>, 5>;

const Grid kExample = {{{1, 15, 24, 8, 17}, {23, 7, 16, 5, 14}, {20, 4, 13, 22, 6}, {12, 21, 10, 19, 3}, {9, 18, 2, 11, 25}}};

// Oracle: sums every row, column and wrapped diagonal straight from the grid.
bool oracle_pan_magic(const Grid& g) {
  for (int i = 0; i < 5; ++i) {
    int row = 0, col = 0, diag = 0, anti = 0;
    for (int j = 0; j < 5; ++j) {
      row += g[i][j];
      col += g[j][i];
      diag += g[j][(j + i) % 5];
      anti += g[j][(i - j + 5) % 5];
    }
    if (row != 65 || col != 65 || diag != 65 || anti != 65) return false;
  }
  return true;
}

bool oracle_magic(const Grid& g) {
  int d = 0, a = 0;
  for (int i = 0; i < 5; ++i) {
    int row = 0, col = 0;
    for (int j = 0; j < 5; ++j) {
      row += g[i][j];
      col += g[j][i];
    }
    if (row != 65 || col != 65) return false;
    d += g[i][i];
    a += g[i][4 - i];
  }
  return d == 65 && a == 65;
}

Grid to_grid(const Square5& s) {
  Grid g{};
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) g[r][c] = s.at(r, c);
  return g;
}

// Oracle orbit: the dihedral group built from transpose and horizontal flip,
// composed with all toroidal shifts.
std::set<Grid> oracle_orbit(const Grid& g) {
  auto transpose = [](const Grid& x) {
    Grid t{};
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) t[c][r] = x[r][c];
    return t;
  };
  auto flip = [](const Grid& x) {
    Grid t{};
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) t[r][4 - c] = x[r][c];
    return t;
  };
  std::set<Grid> dihedral{g};
  for (bool grew = true; grew;) {
    grew = false;
    for (const Grid& x : std::set<Grid>(dihedral))
      for (const Grid& y : {transpose(x), flip(x)}) grew |= dihedral.insert(y).second;
  }
  std::set<Grid> out;
  for (const Grid& x : dihedral)
    for (int dr = 0; dr < 5; ++dr)
      for (int dc = 0; dc < 5; ++dc) {
        Grid t{};
        for (int r = 0; r < 5; ++r)
          for (int c = 0; c < 5; ++c) t[r][c] = x[(r + dr) % 5][(c + dc) % 5];
        out.insert(t);
      }
  return out;
}

const std::vector<Square5>& all_squares() {
  static const auto squares = enumerate_pan_magic();
  return squares;
}

TEST(Square5, RejectsNonPermutations) {
  Square5::Cells cells{};
  std::iota(cells.begin(), cells.end(), 1);
  EXPECT_NO_THROW(Square5{cells});
  cells[3] = cells[4];
  EXPECT_THROW(Square5{cells}, PreconditionError);
  cells[3] = 26;
  EXPECT_THROW(Square5{cells}, PreconditionError);
}

TEST(IsMagic, WorkedExample) {
  const auto s = Square5::from_rows(kExample);
  ASSERT_TRUE(oracle_magic(kExample));
  ASSERT_TRUE(oracle_pan_magic(kExample));
  EXPECT_TRUE(is_magic(s));
  EXPECT_TRUE(is_pan_magic(s));
}

TEST(IsMagic, RowMajorSequenceIsNotMagic) {
  Square5::Cells cells{};
  std::iota(cells.begin(), cells.end(), 1);
  EXPECT_FALSE(is_magic(Square5(cells)));
  EXPECT_FALSE(is_pan_magic(Square5(cells)));
}

TEST(IsMagic, SwappingTwoCellsBreaksIt) {
  Grid g = kExample;
  std::swap(g[0][0], g[0][1]);
  EXPECT_FALSE(is_magic(Square5::from_rows(g)));
}

TEST(IsPanMagic, CyclicTranslationsStayPanMagic) {
  for (int shift = 0; shift < 5; ++shift) {
    Grid g{};
    for (int r = 0; r < 5; ++r) g[r] = kExample[(r + shift) % 5];
    EXPECT_TRUE(is_pan_magic(Square5::from_rows(g))) << "row shift " << shift;
  }
}

TEST(IsPanMagic, AgreesWithOracleOnRandomPermutations) {
  std::mt19937_64 rng(11);
  Square5::Cells cells{};
  std::iota(cells.begin(), cells.end(), 1);
  for (int i = 0; i < 2000; ++i) {
    std::shuffle(cells.begin(), cells.end(), rng);
    const Square5 s(cells);
    EXPECT_EQ(is_magic(s), oracle_magic(to_grid(s)));
    EXPECT_EQ(is_pan_magic(s), oracle_pan_magic(to_grid(s)));
  }
}

TEST(Orbit, HasTwoHundredMembersMatchingOracle) {
  const auto s = Square5::from_rows(kExample);
  const auto orb = orbit(s);
  ASSERT_EQ(orb.size(), 200u);
  const auto oracle = oracle_orbit(kExample);
  ASSERT_EQ(oracle.size(), 200u);
  std::set<Grid> mine;
  for (const auto& m : orb) mine.insert(to_grid(m));
  EXPECT_EQ(mine, oracle);
  EXPECT_TRUE(std::binary_search(orb.begin(), orb.end(), s));
  for (const auto& m : orb) EXPECT_TRUE(oracle_pan_magic(to_grid(m)));
}

TEST(Orbit, OrbitsPartition) {
  const auto s = Square5::from_rows(kExample);
  const auto orb = orbit(s);
  for (std::size_t i = 0; i < orb.size(); i += 37) EXPECT_EQ(orbit(orb[i]), orb);
}

TEST(Orbit, RejectsNonPanMagicInput) {
  Grid g = kExample;
  std::swap(g[1][1], g[2][3]);
  EXPECT_THROW(orbit(Square5::from_rows(g)), PreconditionError);
  EXPECT_THROW(canonical_form(Square5::from_rows(g)), PreconditionError);
}

TEST(CanonicalForm, IsAnIdempotentOrbitInvariantMember) {
  const auto s = Square5::from_rows(kExample);
  const auto c = canonical_form(s);
  EXPECT_EQ(canonical_form(c), c);
  EXPECT_EQ(c.at(0, 0), 1);
  const auto orb = orbit(s);
  EXPECT_EQ(c, orb.front());
  for (std::size_t i = 0; i < orb.size(); i += 13) EXPECT_EQ(canonical_form(orb[i]), c);
}

TEST(Enumerate, ReturnsOneHundredFortyFourSortedCanonicalSquares) {
  const auto& sq = all_squares();
  ASSERT_EQ(sq.size(), 144u);
  EXPECT_TRUE(std::is_sorted(sq.begin(), sq.end()));
  EXPECT_EQ(std::adjacent_find(sq.begin(), sq.end()), sq.end());
  for (const auto& s : sq) {
    EXPECT_TRUE(oracle_pan_magic(to_grid(s)));
    EXPECT_EQ(canonical_form(s), s);
    EXPECT_EQ(s.at(0, 0), 1);
  }
}

TEST(Enumerate, OrbitsAreDisjointAndTotalTwentyEightThousandEightHundred) {
  std::set<Grid> everything;
  std::size_t mass = 0;
  for (const auto& s : all_squares()) {
    const auto orb = oracle_orbit(to_grid(s));
    mass += orb.size();
    everything.insert(orb.begin(), orb.end());
  }
  EXPECT_EQ(mass, 28800u);
  EXPECT_EQ(everything.size(), 28800u);
}

TEST(Enumerate, ContainsTheWorkedExampleOrbit) {
  const auto c = canonical_form(Square5::from_rows(kExample));
  EXPECT_TRUE(std::binary_search(all_squares().begin(), all_squares().end(), c));
}

TEST(Corrupt, EverySwapOfAValidSquareIsNotMagic) {
  const auto cells = Square5::from_rows(kExample).cells();
  int swaps = 0;
  for (int a = 0; a < 25; ++a)
    for (int b = a + 1; b < 25; ++b) {
      auto c = cells;
      std::swap(c[a], c[b]);
      EXPECT_FALSE(is_magic(Square5(c)));
      ++swaps;
    }
  EXPECT_EQ(swaps, 300);
}

TEST(Corrupt, SwapsExactlyTwoCellsDeterministically) {
  const auto s = Square5::from_rows(kExample);
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 200; ++i) {
    const auto x = corrupt(s, a);
    EXPECT_EQ(x, corrupt(s, b));
    int diff = 0;
    for (int k = 0; k < 25; ++k) diff += x.cells()[k] != s.cells()[k];
    EXPECT_EQ(diff, 2);
    EXPECT_FALSE(is_magic(x));
  }
}

TEST(Corrupt, PositionsAreRoughlyUniform) {
  const auto s = Square5::from_rows(kExample);
  std::mt19937_64 rng(9);
  std::array<int, 25> hits{};
  constexpr int kDraws = 25000;
  for (int i = 0; i < kDraws; ++i) {
    const auto x = corrupt(s, rng);
    for (int k = 0; k < 25; ++k) hits[k] += x.cells()[k] != s.cells()[k];
  }
  // Each cell is touched with probability 2/25; 2000 expected, sd about 43.
  for (int h : hits) EXPECT_NEAR(h, 2000, 250);
}

TEST(Dataset, IsStratifiedAndLabelledCorrectly) {
  std::mt19937_64 rng(42);
  const auto data = build_magic_dataset(rng);
  ASSERT_EQ(data.size(), 288u);
  int valid = 0;
  for (const auto& ls : data) {
    if (ls.label == SquareLabel::Valid) {
      ++valid;
      EXPECT_TRUE(is_pan_magic(ls.square));
    } else {
      EXPECT_FALSE(is_magic(ls.square));
    }
  }
  EXPECT_EQ(valid, 144);
}

TEST(Dataset, SameSeedSameCorpus) {
  std::mt19937_64 a(3), b(3), c(4);
  const auto x = build_magic_dataset(a), y = build_magic_dataset(b), z = build_magic_dataset(c);
  ASSERT_EQ(x.size(), y.size());
  bool same_as_other_seed = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].square, y[i].square);
    EXPECT_EQ(x[i].label, y[i].label);
    same_as_other_seed &= x[i].square == z[i].square;
  }
  EXPECT_FALSE(same_as_other_seed);
}

TEST(Dataset, CsvHasHeaderAndTwentySevenColumns) {
  std::mt19937_64 rng(1);
  const auto data = build_magic_dataset(rng);
  std::ostringstream os;
  write_magic_csv(os, data, 1);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 19), "label,seed,c00,c01,");
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 26);
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 26);
    ++rows;
  }
  EXPECT_EQ(rows, 288);
}

}  // namespace
