// Copyright 2026 The peecs Authors.
//
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

#ifndef PEECS_METRICS_HPP_
#define PEECS_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "peecs/assignment.hpp"

namespace peecs {

struct Position {
  double x{0.0};
  double y{0.0};
};

struct OspaParams {
  double cutoff{100.0};
  double order{2.0};

  void validate() const {
    if (!(cutoff > 0.0) || !(order >= 1.0)) throw Error("OSPA: need c > 0 and p >= 1");
  }
};

struct OspaResult {
  double total{0.0};
  double localization{0.0};
  double cardinality{0.0};
};

/// Optimal subpattern assignment distance between two planar point sets.
///
/// With m = min(|X|, |Y|), n = max(|X|, |Y|) and d_c = min(d, c):
///   total^p        = (min_pi sum d_c^p + c^p (n - m)) / n
///   localization^p = min_pi sum d_c^p / n
///   cardinality^p  = c^p (n - m) / n
/// Both sets empty gives zeros.
[[nodiscard]] inline OspaResult ospa(std::span<const Position> xs, std::span<const Position> ys,
                                     const OspaParams& params = {}) {
  params.validate();
  const auto& small = xs.size() <= ys.size() ? xs : ys;
  const auto& large = xs.size() <= ys.size() ? ys : xs;
  const std::size_t m = small.size();
  const std::size_t n = large.size();
  if (n == 0) return {};
  const double c = params.cutoff;
  const double p = params.order;
  const double cp = std::pow(c, p);

  double loc_sum = 0.0;
  if (m > 0) {
    CostMatrix cost(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = std::hypot(small[i].x - large[j].x, small[i].y - large[j].y);
        cost(i, j) = std::pow(std::min(d, c), p);
      }
    }
    loc_sum = optimal_assignment(cost)->cost;
  }
  const double card_sum = cp * static_cast<double>(n - m);
  const double nn = static_cast<double>(n);
  OspaResult out;
  out.total = std::min(c, std::pow((loc_sum + card_sum) / nn, 1.0 / p));
  out.localization = std::pow(loc_sum / nn, 1.0 / p);
  out.cardinality = std::pow(card_sum / nn, 1.0 / p);
  return out;
}

}  // namespace peecs

#endif  // PEECS_METRICS_HPP_
