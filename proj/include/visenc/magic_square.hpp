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
// 5x5 pan-magic squares: validation, toroidal/dihedral symmetry, exhaustive
// enumeration of the canonical representatives, and the corrupted-square
// dataset built from them.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "visenc/errors.hpp"

namespace visenc::magic {

inline constexpr int kOrder = 5;
inline constexpr int kCells = kOrder * kOrder;
inline constexpr int kMagicConstant = kOrder * (kCells + 1) / 2;
static_assert(kMagicConstant == 65);

/// A 5x5 grid holding each of 1..25 exactly once, row-major.
class Square5 {
 public:
  using Cells = std::array<int, kCells>;

  /// Throws PreconditionError unless `cells` is a permutation of 1..25.
  explicit Square5(const Cells& cells) : cells_(cells) {
    std::array<bool, kCells + 1> seen{};
    for (int v : cells_) {
      if (v < 1 || v > kCells || seen[v])
        throw PreconditionError("Square5: cells must be a permutation of 1..25");
      seen[v] = true;
    }
  }

  static Square5 from_rows(const std::array<std::array<int, kOrder>, kOrder>& rows) {
    Cells c{};
    for (int r = 0; r < kOrder; ++r)
      for (int col = 0; col < kOrder; ++col) c[r * kOrder + col] = rows[r][col];
    return Square5(c);
  }

  int at(int row, int col) const { return cells_[row * kOrder + col]; }
  const Cells& cells() const { return cells_; }

  auto operator<=>(const Square5&) const = default;

 private:
  Cells cells_;
};

inline std::ostream& operator<<(std::ostream& os, const Square5& s) {
  for (int r = 0; r < kOrder; ++r) {
    for (int c = 0; c < kOrder; ++c) os << (c ? " " : "") << s.at(r, c);
    os << '\n';
  }
  return os;
}

enum class SquareLabel : int { Invalid = 0, Valid = 1 };

struct LabeledSquare {
  Square5 square;
  SquareLabel label;
};

namespace detail {

inline int wrap(int i) { return ((i % kOrder) + kOrder) % kOrder; }

// The 20 lines of a pan-magic square: 5 rows, 5 columns, 5 wrapped
// diagonals (col - row = k) and 5 wrapped anti-diagonals (col + row = k).
inline constexpr int kLineCount = 4 * kOrder;

inline const std::array<std::array<int, kOrder>, kLineCount>& all_lines() {
  static const auto lines = [] {
    std::array<std::array<int, kOrder>, kLineCount> out{};
    for (int k = 0; k < kOrder; ++k) {
      for (int i = 0; i < kOrder; ++i) {
        out[k][i] = k * kOrder + i;
        out[kOrder + k][i] = i * kOrder + k;
        out[2 * kOrder + k][i] = i * kOrder + wrap(i + k);
        out[3 * kOrder + k][i] = i * kOrder + wrap(k - i);
      }
    }
    return out;
  }();
  return lines;
}

inline int line_sum(const Square5& s, const std::array<int, kOrder>& line) {
  int sum = 0;
  for (int idx : line) sum += s.cells()[idx];
  return sum;
}

}  // namespace detail

/// Rows, columns and both main diagonals all sum to 65.
inline bool is_magic(const Square5& s) {
  for (int k = 0; k < kOrder; ++k) {
    int row = 0, col = 0;
    for (int i = 0; i < kOrder; ++i) {
      row += s.at(k, i);
      col += s.at(i, k);
    }
    if (row != kMagicConstant || col != kMagicConstant) return false;
  }
  int diag = 0, anti = 0;
  for (int i = 0; i < kOrder; ++i) {
    diag += s.at(i, i);
    anti += s.at(i, kOrder - 1 - i);
  }
  return diag == kMagicConstant && anti == kMagicConstant;
}

/// Magic, and every wrapped (broken) diagonal in both directions sums to 65.
inline bool is_pan_magic(const Square5& s) {
  if (!is_magic(s)) return false;
  const auto& lines = detail::all_lines();
  for (int l = 2 * kOrder; l < detail::kLineCount; ++l)
    if (detail::line_sum(s, lines[l]) != kMagicConstant) return false;
  return true;
}

/// One element of the 200-member symmetry group: toroidal shift by
/// (row_shift, col_shift), then `quarter_turns` clockwise rotations, then an
/// optional left-right reflection.
struct Symmetry {
  int row_shift = 0;
  int col_shift = 0;
  int quarter_turns = 0;
  bool reflect = false;
};

inline Square5 apply(const Square5& s, const Symmetry& g) {
  Square5::Cells out{};
  for (int r = 0; r < kOrder; ++r) {
    for (int c = 0; c < kOrder; ++c) {
      int rr = r, cc = c;
      for (int t = 0; t < g.quarter_turns; ++t) {
        const int tmp = rr;
        rr = cc;
        cc = kOrder - 1 - tmp;
      }
      if (g.reflect) cc = kOrder - 1 - cc;
      out[rr * kOrder + cc] =
          s.at(detail::wrap(r + g.row_shift), detail::wrap(c + g.col_shift));
    }
  }
  return Square5(out);
}

inline std::vector<Symmetry> symmetry_group() {
  std::vector<Symmetry> group;
  group.reserve(kCells * 8);
  for (int dr = 0; dr < kOrder; ++dr)
    for (int dc = 0; dc < kOrder; ++dc)
      for (int q = 0; q < 4; ++q)
        for (bool refl : {false, true}) group.push_back({dr, dc, q, refl});
  return group;
}

namespace detail {
inline void require_pan_magic(const Square5& s, const char* where) {
  if (!is_pan_magic(s)) throw PreconditionError(std::string(where) + ": square is not pan-magic");
}
}  // namespace detail

/// All distinct images of a pan-magic square under translations, rotations
/// and reflections, sorted row-major lexicographically.
inline std::vector<Square5> orbit(const Square5& s) {
  detail::require_pan_magic(s, "orbit");
  std::set<Square5> members;
  for (const auto& g : symmetry_group()) members.insert(apply(s, g));
  return {members.begin(), members.end()};
}

/// Lexicographically smallest orbit member.
inline Square5 canonical_form(const Square5& s) {
  detail::require_pan_magic(s, "canonical_form");
  Square5 best = s;
  for (const auto& g : symmetry_group()) best = std::min(best, apply(s, g));
  return best;
}

namespace detail {

// Depth-first enumeration over a small set of "free" cells. The 20 line
// equations have rank 17, so once the free cells below are placed every other
// cell is an integer affine combination of them; each dependent cell is
// filled as soon as the free cells it depends on are placed, and the branch is
// cut when a value leaves 1..25, repeats, or a partially filled line can no
// longer reach 65 with the values still unused.
class PanMagicSearch {
 public:
  static constexpr std::array<int, 8> kFreeCells = {0, 1, 8, 7, 4, 6, 2, 5};

  PanMagicSearch() { derive_expressions(); }

  /// Every pan-magic square with the value 1 in the top-left corner. Any
  /// pan-magic square can be translated to that form, so canonical forms
  /// derived from this list cover every orbit.
  std::vector<Square5> run() {
    cells_.fill(0);
    used_ = 0;
    found_.clear();
    place(0);
    return found_;
  }

 private:
  struct Expr {
    int cell = 0;
    int constant = 0;
    std::array<int, kFreeCells.size()> coef{};
  };

  void derive_expressions() {
    std::array<bool, kCells> is_free{};
    for (int f : kFreeCells) is_free[f] = true;
    std::vector<int> dependent;
    for (int j = 0; j < kCells; ++j)
      if (!is_free[j]) dependent.push_back(j);
    const int nd = static_cast<int>(dependent.size());
    const int nf = static_cast<int>(kFreeCells.size());
    const int width = nd + nf + 1;

    // Rows: sum(dependent) = 65 - sum(free); eliminate on the dependent block.
    std::vector<std::vector<double>> m(kLineCount, std::vector<double>(width, 0.0));
    const auto& lines = all_lines();
    for (int l = 0; l < kLineCount; ++l) {
      for (int idx : lines[l]) {
        if (is_free[idx]) {
          const auto pos = std::find(kFreeCells.begin(), kFreeCells.end(), idx) - kFreeCells.begin();
          m[l][nd + pos] -= 1.0;
        } else {
          const auto pos = std::find(dependent.begin(), dependent.end(), idx) - dependent.begin();
          m[l][pos] += 1.0;
        }
      }
      m[l][width - 1] = kMagicConstant;
    }
    int row = 0;
    for (int col = 0; col < nd; ++col) {
      int pivot = -1;
      for (int i = row; i < kLineCount; ++i)
        if (std::fabs(m[i][col]) > 1e-9) {
          pivot = i;
          break;
        }
      if (pivot < 0) throw std::logic_error("PanMagicSearch: free cells do not determine the square");
      std::swap(m[pivot], m[row]);
      const double scale = m[row][col];
      for (double& x : m[row]) x /= scale;
      for (int i = 0; i < kLineCount; ++i) {
        if (i == row || std::fabs(m[i][col]) < 1e-12) continue;
        const double f = m[i][col];
        for (int c = 0; c < width; ++c) m[i][c] -= f * m[row][c];
      }
      ++row;
    }

    auto to_int = [](double x) {
      const double r = std::round(x);
      if (std::fabs(x - r) > 1e-9) throw std::logic_error("PanMagicSearch: non-integral line relation");
      return static_cast<int>(r);
    };
    by_level_.assign(kFreeCells.size(), {});
    for (int a = 0; a < nd; ++a) {
      Expr e;
      e.cell = dependent[a];
      e.constant = to_int(m[a][width - 1]);
      int level = 0;
      for (int b = 0; b < nf; ++b) {
        e.coef[b] = to_int(m[a][nd + b]);
        if (e.coef[b] != 0) level = b;
      }
      by_level_[level].push_back(e);
    }
  }

  bool lines_completable() const {
    // Sorted unused values, smallest first.
    std::array<int, kCells> free_vals{};
    int n_free = 0;
    for (int v = 1; v <= kCells; ++v)
      if (!(used_ >> v & 1u)) free_vals[n_free++] = v;
    for (const auto& line : all_lines()) {
      int sum = 0, missing = 0;
      for (int idx : line) {
        if (cells_[idx] == 0) ++missing;
        else sum += cells_[idx];
      }
      if (missing == 0) {
        if (sum != kMagicConstant) return false;
        continue;
      }
      if (missing > n_free) return false;
      int lo = 0, hi = 0;
      for (int i = 0; i < missing; ++i) {
        lo += free_vals[i];
        hi += free_vals[n_free - 1 - i];
      }
      if (sum + lo > kMagicConstant || sum + hi < kMagicConstant) return false;
    }
    return true;
  }

  void place(std::size_t level) {
    if (level == kFreeCells.size()) {
      found_.emplace_back(cells_);
      return;
    }
    const int hi = level == 0 ? 1 : kCells;  // translation puts 1 top-left
    for (int v = 1; v <= hi; ++v) {
      if (used_ >> v & 1u) continue;
      cells_[kFreeCells[level]] = v;
      std::uint32_t added = 1u << v;
      used_ |= added;
      bool ok = true;
      std::vector<int> filled;
      for (const Expr& e : by_level_[level]) {
        int val = e.constant;
        for (std::size_t b = 0; b <= level; ++b) val += e.coef[b] * cells_[kFreeCells[b]];
        if (val < 1 || val > kCells || (used_ >> val & 1u)) {
          ok = false;
          break;
        }
        cells_[e.cell] = val;
        filled.push_back(e.cell);
        used_ |= 1u << val;
        added |= 1u << val;
      }
      if (ok && lines_completable()) place(level + 1);
      for (int idx : filled) cells_[idx] = 0;
      cells_[kFreeCells[level]] = 0;
      used_ &= ~added;
    }
  }

  std::vector<std::vector<Expr>> by_level_;
  Square5::Cells cells_{};
  std::uint32_t used_ = 0;
  std::vector<Square5> found_;
};

}  // namespace detail

/// The canonical forms of all 5x5 pan-magic squares, sorted. There are 144.
inline std::vector<Square5> enumerate_pan_magic() {
  std::set<Square5> canon;
  for (const Square5& s : detail::PanMagicSearch{}.run()) canon.insert(canonical_form(s));
  return {canon.begin(), canon.end()};
}

/// Swaps two distinct, uniformly chosen cells. The result is never magic:
/// the two values differ, so the row or column sums through them shift.
template <class Rng>
Square5 corrupt(const Square5& s, Rng& rng) {
  detail::require_pan_magic(s, "corrupt");
  std::uniform_int_distribution<int> first(0, kCells - 1);
  std::uniform_int_distribution<int> second(0, kCells - 2);
  const int a = first(rng);
  int b = second(rng);
  if (b >= a) ++b;
  Square5::Cells cells = s.cells();
  std::swap(cells[a], cells[b]);
  Square5 out(cells);
  if (is_magic(out)) throw std::logic_error("corrupt: swap produced a magic square");
  return out;
}

/// 144 canonical squares (Valid) and one corrupted copy of each (Invalid),
/// shuffled.
template <class Rng>
std::vector<LabeledSquare> build_magic_dataset(Rng& rng) {
  const auto valid = enumerate_pan_magic();
  std::vector<LabeledSquare> out;
  out.reserve(2 * valid.size());
  for (const auto& s : valid) out.push_back({s, SquareLabel::Valid});
  for (const auto& s : valid) out.push_back({corrupt(s, rng), SquareLabel::Invalid});
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// CSV export: `label,seed,c00..c44`.
inline void write_magic_csv(std::ostream& os, const std::vector<LabeledSquare>& data,
                            std::uint64_t seed) {
  os << "label,seed";
  for (int r = 0; r < kOrder; ++r)
    for (int c = 0; c < kOrder; ++c) os << ",c" << r << c;
  os << '\n';
  for (const auto& ls : data) {
    os << static_cast<int>(ls.label) << ',' << seed;
    for (int v : ls.square.cells()) os << ',' << v;
    os << '\n';
  }
}

}  // namespace visenc::magic
