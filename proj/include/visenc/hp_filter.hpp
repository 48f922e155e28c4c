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
// Hodrick-Prescott trend extraction. The trend solves the pentadiagonal
// system (I + lambda D'D) tau = y, D being the (n-2) x n second-difference
// operator; a banded LDL' factorization handles it in O(n).

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "visenc/errors.hpp"

namespace visenc::hp {

struct HpParams {
  double lambda = 100.0;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw PreconditionError("HpParams: lambda must be finite and >= 0");
  }
};

/// Symmetric pentadiagonal matrix stored by diagonals: d0[i] = A(i,i),
/// d1[i] = A(i+1,i), d2[i] = A(i+2,i).
struct Pentadiagonal {
  std::vector<double> d0, d1, d2;

  std::size_t size() const { return d0.size(); }
};

/// I + lambda D'D for a series of length n.
inline Pentadiagonal hp_system(std::size_t n, double lambda) {
  Pentadiagonal a{std::vector<double>(n, 1.0), std::vector<double>(n > 0 ? n - 1 : 0, 0.0),
                  std::vector<double>(n > 1 ? n - 2 : 0, 0.0)};
  constexpr double row[3] = {1.0, -2.0, 1.0};
  // Accumulate lambda * outer(row, row) for every second-difference row.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    for (int i = 0; i < 3; ++i) {
      a.d0[k + i] += lambda * row[i] * row[i];
      if (i < 2) a.d1[k + i] += lambda * row[i] * row[i + 1];
    }
    a.d2[k] += lambda * row[0] * row[2];
  }
  return a;
}

/// Unit lower-triangular L (sub-diagonals e, f) and diagonal D with A = L D L'.
class BandedLdl {
 public:
  explicit BandedLdl(const Pentadiagonal& a) : d_(a.size()), e_(a.size(), 0.0), f_(a.size(), 0.0) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
      double di = a.d0[i];
      if (i >= 2) {
        f_[i] = a.d2[i - 2] / d_[i - 2];
        di -= f_[i] * f_[i] * d_[i - 2];
      }
      if (i >= 1) {
        double off = a.d1[i - 1];
        if (i >= 2) off -= f_[i] * e_[i - 1] * d_[i - 2];
        e_[i] = off / d_[i - 1];
        di -= e_[i] * e_[i] * d_[i - 1];
      }
      if (!(di > 0.0)) throw DataError("hp_filter: system is not positive definite");
      d_[i] = di;
    }
  }

  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t n = d_.size();
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 1; i < n; ++i) {
      x[i] -= e_[i] * x[i - 1];
      if (i >= 2) x[i] -= f_[i] * x[i - 2];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= d_[i];
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) x[i] -= e_[i + 1] * x[i + 1];
      if (i + 2 < n) x[i] -= f_[i + 2] * x[i + 2];
    }
    return x;
  }

 private:
  std::vector<double> d_, e_, f_;
};

/// y - (I + lambda D'D) tau, accumulated in extended precision so that
/// refinement can recover the digits the factorization loses at large lambda.
inline std::vector<double> hp_residual(std::span<const double> y, std::span<const double> tau, double lambda) {
  const std::size_t n = y.size();
  std::vector<long double> dd(n, 0.0L);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const long double s = static_cast<long double>(tau[k]) - 2.0L * tau[k + 1] + tau[k + 2];
    dd[k] += s;
    dd[k + 1] -= 2.0L * s;
    dd[k + 2] += s;
  }
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = static_cast<double>(static_cast<long double>(y[i]) - tau[i] - static_cast<long double>(lambda) * dd[i]);
  return r;
}

/// Normwise relative backward error |y - A tau|_inf / (|A|_inf |tau|_inf + |y|_inf).
inline double hp_relative_residual(std::span<const double> y, std::span<const double> tau, double lambda) {
  const auto r = hp_residual(y, tau, lambda);
  double rn = 0.0, tn = 0.0, yn = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    rn = std::max(rn, std::fabs(r[i]));
    tn = std::max(tn, std::fabs(tau[i]));
    yn = std::max(yn, std::fabs(y[i]));
  }
  const double a_norm = 1.0 + 16.0 * lambda;  // row sums of |I + lambda D'D| are at most this
  const double denom = a_norm * tn + yn;
  return denom > 0.0 ? rn / denom : 0.0;
}

/// Trend component of `y`. Throws PreconditionError for fewer than three
/// points or an invalid lambda.
inline std::vector<double> hp_filter(std::span<const double> y, const HpParams& params = {}) {
  params.validate();
  if (y.size() < 3) throw PreconditionError("hp_filter: need at least three observations");
  for (double v : y)
    if (!std::isfinite(v)) throw DataError("hp_filter: non-finite observation");
  if (params.lambda == 0.0) return {y.begin(), y.end()};

  const BandedLdl ldl(hp_system(y.size(), params.lambda));
  std::vector<double> tau = ldl.solve(y);
  constexpr int kRefinements = 3;
  for (int it = 0; it < kRefinements; ++it) {
    const auto corr = ldl.solve(hp_residual(y, tau, params.lambda));
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] += corr[i];
  }
  return tau;
}

}  // namespace visenc::hp
