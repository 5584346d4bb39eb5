//
// Copyright 2026 The Histsan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "bounding_lp.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace histsan::internal {

std::optional<double> MaximizeOverPolytope(std::span<const Halfspace> faces,
                                           std::span<const double> low,
                                           std::span<const double> high,
                                           std::span<const double> objective) {
  const size_t d = objective.size();
  // Column j of the dual is row j of the primal constraint matrix. Columns
  // [0, d) are +e_k <= high_k, [d, 2d) are -e_k <= -low_k, then the faces.
  const size_t num_cols = 2 * d + faces.size();
  auto column_entry = [&](size_t j, size_t i) -> double {
    if (j < d) return j == i ? 1.0 : 0.0;
    if (j < 2 * d) return (j - d) == i ? -1.0 : 0.0;
    return faces[j - 2 * d].normal[i];
  };
  auto cost = [&](size_t j) -> double {
    if (j < d) return high[j];
    if (j < 2 * d) return -low[j - d];
    return faces[j - 2 * d].offset;
  };

  std::vector<size_t> basis(d);
  std::vector<double> basis_inv(d * d, 0.0);  // row-major
  std::vector<double> y(d);
  for (size_t k = 0; k < d; ++k) {
    const bool positive = objective[k] >= 0.0;
    basis[k] = positive ? k : d + k;
    basis_inv[k * d + k] = positive ? 1.0 : -1.0;
    y[k] = std::abs(objective[k]);
  }

  double scale = 1.0;
  for (size_t j = 0; j < num_cols; ++j) {
    scale = std::max(scale, std::abs(cost(j)));
  }
  const double tol = 1e-11;
  const size_t max_iterations = 50 * (num_cols + d) + 100;
  const size_t bland_after = 10 * (num_cols + d);

  std::vector<double> prices(d);
  std::vector<double> direction(d);
  for (size_t iteration = 0; iteration < max_iterations; ++iteration) {
    // prices = c_B^T B^{-1}; at optimality these are the primal solution.
    for (size_t i = 0; i < d; ++i) {
      double sum = 0.0;
      for (size_t k = 0; k < d; ++k) sum += cost(basis[k]) * basis_inv[k * d + i];
      prices[i] = sum;
    }
    size_t entering = num_cols;
    double best = -tol * scale;
    const bool use_bland = iteration >= bland_after;
    for (size_t j = 0; j < num_cols; ++j) {
      double reduced = cost(j);
      for (size_t i = 0; i < d; ++i) reduced -= prices[i] * column_entry(j, i);
      if (reduced < best) {
        entering = j;
        if (use_bland) break;
        best = reduced;
      }
    }
    if (entering == num_cols) {
      double value = 0.0;
      for (size_t k = 0; k < d; ++k) value += cost(basis[k]) * y[k];
      if (!std::isfinite(value)) return std::nullopt;
      return value;
    }
    for (size_t k = 0; k < d; ++k) {
      double sum = 0.0;
      for (size_t i = 0; i < d; ++i) {
        sum += basis_inv[k * d + i] * column_entry(entering, i);
      }
      direction[k] = sum;
    }
    size_t leaving = d;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < d; ++k) {
      if (direction[k] > tol) {
        const double ratio = y[k] / direction[k];
        if (ratio < best_ratio ||
            (ratio == best_ratio && leaving < d && basis[k] < basis[leaving])) {
          best_ratio = ratio;
          leaving = k;
        }
      }
    }
    if (leaving == d) return std::nullopt;  // dual unbounded: primal empty

    const double pivot = direction[leaving];
    for (size_t k = 0; k < d; ++k) {
      if (k != leaving) y[k] = std::max(0.0, y[k] - best_ratio * direction[k]);
    }
    y[leaving] = best_ratio;
    for (size_t i = 0; i < d; ++i) basis_inv[leaving * d + i] /= pivot;
    for (size_t k = 0; k < d; ++k) {
      if (k == leaving || direction[k] == 0.0) continue;
      const double factor = direction[k];
      for (size_t i = 0; i < d; ++i) {
        basis_inv[k * d + i] -= factor * basis_inv[leaving * d + i];
      }
    }
    basis[leaving] = entering;
  }
  return std::nullopt;
}

}  // namespace histsan::internal
