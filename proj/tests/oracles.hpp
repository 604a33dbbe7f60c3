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

// Brute-force reference implementations. They only use the library's plain
// data types, never its algorithms.

#ifndef PEECS_TESTS_ORACLES_HPP_
#define PEECS_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "peecs/rfs_types.hpp"

namespace peecs::oracle {

inline double clamp_r(double r) { return std::min(std::max(r, 1e-9), 1.0 - 1e-9); }

struct Subset {
  std::vector<std::size_t> indices;
  double weight{0.0};
};

/// Every subset of n components with its product weight, ranked by weight
/// (descending) and then by the ascending index list.
inline std::vector<Subset> ranked_power_set(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<Subset> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Subset s;
    s.weight = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in = (mask >> i) & 1U;
      const double ri = clamp_r(r[i]);
      s.weight *= in ? ri : 1.0 - ri;
      if (in) s.indices.push_back(i);
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Subset& a, const Subset& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.indices < b.indices;
  });
  return out;
}

struct RankedMap {
  std::vector<int> cols;
  double cost{0.0};
};

/// All injective row -> column maps avoiding infinite entries, ranked by
/// (row-order cost sum, column vector).
inline std::vector<RankedMap> ranked_injective_maps(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = n == 0 ? 0 : cost[0].size();
  std::vector<RankedMap> out;
  std::vector<int> cols(n, -1);
  std::vector<char> used(m, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      double total = 0.0;
      for (std::size_t a = 0; a < n; ++a) total += cost[a][static_cast<std::size_t>(cols[a])];
      out.push_back(RankedMap{cols, total});
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j] || std::isinf(cost[i][j])) continue;
      used[j] = 1;
      cols[i] = static_cast<int>(j);
      rec(i + 1);
      used[j] = 0;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [](const RankedMap& a, const RankedMap& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.cols < b.cols;
  });
  return out;
}

/// Minimum over all ways of matching min(n, m) rows and columns.
inline double min_matching_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = n == 0 ? 0 : cost[0].size();
  if (n <= m) {
    const auto maps = ranked_injective_maps(cost);
    return maps.empty() ? std::numeric_limits<double>::infinity() : maps.front().cost;
  }
  std::vector<std::vector<double>> t(m, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) t[j][i] = cost[i][j];
  }
  return min_matching_cost(t);
}

/// OSPA by enumerating every injection of the smaller set into the larger.
inline std::array<double, 3> ospa(const std::vector<std::array<double, 2>>& x,
                                  const std::vector<std::array<double, 2>>& y, double c, double p) {
  const auto& a = x.size() <= y.size() ? x : y;
  const auto& b = x.size() <= y.size() ? y : x;
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (n == 0) return {0.0, 0.0, 0.0};
  double best = 0.0;
  if (m > 0) {
    std::vector<std::vector<double>> d(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dist =
            std::sqrt((a[i][0] - b[j][0]) * (a[i][0] - b[j][0]) + (a[i][1] - b[j][1]) * (a[i][1] - b[j][1]));
        d[i][j] = std::pow(std::min(dist, c), p);
      }
    }
    best = min_matching_cost(d);
  }
  const double card = std::pow(c, p) * static_cast<double>(n - m);
  return {std::pow((best + card) / static_cast<double>(n), 1.0 / p),
          std::pow(best / static_cast<double>(n), 1.0 / p),
          std::pow(card / static_cast<double>(n), 1.0 / p)};
}

/// Coordinated-turn flow integrated with classical Runge-Kutta; independent
/// of any closed form.
inline std::array<double, 4> integrate_turn(std::array<double, 4> s, double omega, double t,
                                            int steps = 20000) {
  auto f = [omega](const std::array<double, 4>& v) {
    return std::array<double, 4>{v[2], v[3], -omega * v[3], omega * v[2]};
  };
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const auto k1 = f(s);
    std::array<double, 4> tmp{};
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    const auto k2 = f(tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    const auto k3 = f(tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + h * k3[i];
    const auto k4 = f(tmp);
    for (int i = 0; i < 4; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return s;
}

// Scenario models written out from their definitions.

struct SensorModel {
  double sigma_b{std::numbers::pi / 180.0};
  double sigma_r{5.0};
  double r0{300.0};
  double h{0.001};
  double lambda_c{1.6e-3};
  double b_min{-std::numbers::pi}, b_max{std::numbers::pi};
  double r_min{0.0}, r_max{2000.0};
};

inline double pd(const SensorModel& s, double sx, double sy, double tx, double ty) {
  const double d = std::sqrt((tx - sx) * (tx - sx) + (ty - sy) * (ty - sy));
  if (d <= s.r0) return 1.0;
  return std::max(0.0, 1.0 - s.h * (d - s.r0));
}

inline double gaussian_lik(const SensorModel& s, double sx, double sy, double tx, double ty,
                           double zb, double zr) {
  const double dx = tx - sx;
  const double dy = ty - sy;
  double db = zb - std::atan2(dx, dy);
  while (db > std::numbers::pi) db -= 2.0 * std::numbers::pi;
  while (db <= -std::numbers::pi) db += 2.0 * std::numbers::pi;
  const double dr = zr - std::sqrt(dx * dx + dy * dy);
  return std::exp(-0.5 * (db * db / (s.sigma_b * s.sigma_b) + dr * dr / (s.sigma_r * s.sigma_r))) /
         (2.0 * std::numbers::pi * s.sigma_b * s.sigma_r);
}

inline double kappa(const SensorModel& s, double zb, double zr) {
  const bool inside = zb >= s.b_min && zb <= s.b_max && zr >= s.r_min && zr <= s.r_max;
  return inside ? s.lambda_c : 0.0;
}

struct Component {
  double r{0.0};
  std::vector<double> w;
  std::vector<std::array<double, 2>> xy;
};

struct UpdateResult {
  std::vector<double> r;
  std::vector<std::vector<double>> w;  ///< posterior particle weights, normalized
};

/// LMB update by summing over every label subset and every association map.
inline UpdateResult exhaustive_lmb_update(const std::vector<Component>& comps,
                                          const std::vector<std::array<double, 2>>& z,
                                          double sx, double sy, const SensorModel& s) {
  const std::size_t n = comps.size();
  const std::size_t m = z.size();
  // psi[i][o][j]: option o (0 miss, 1..m measurement) for particle j of component i.
  std::vector<std::vector<std::vector<double>>> psi(n, std::vector<std::vector<double>>(m + 1));
  std::vector<std::vector<double>> eta(n, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t o = 0; o <= m; ++o) {
      for (std::size_t j = 0; j < comps[i].w.size(); ++j) {
        const double p = pd(s, sx, sy, comps[i].xy[j][0], comps[i].xy[j][1]);
        double v = 1.0 - p;
        if (o > 0) {
          v = p * gaussian_lik(s, sx, sy, comps[i].xy[j][0], comps[i].xy[j][1], z[o - 1][0], z[o - 1][1]) /
              kappa(s, z[o - 1][0], z[o - 1][1]);
        }
        psi[i][o].push_back(v);
        eta[i][o] += comps[i].w[j] * v;
      }
    }
  }
  std::vector<double> r_post(n, 0.0);
  std::vector<std::vector<double>> mass(n, std::vector<double>(m + 1, 0.0));
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double w_subset = 1.0;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = clamp_r(comps[i].r);
      if ((mask >> i) & 1U) {
        w_subset *= ri;
        members.push_back(i);
      } else {
        w_subset *= 1.0 - ri;
      }
    }
    std::vector<std::size_t> theta(members.size(), 0);
    std::vector<char> used(m + 1, 0);
    std::function<void(std::size_t, double)> rec = [&](std::size_t a, double w) {
      if (a == members.size()) {
        total += w;
        for (std::size_t b = 0; b < members.size(); ++b) {
          r_post[members[b]] += w;
          mass[members[b]][theta[b]] += w;
        }
        return;
      }
      for (std::size_t o = 0; o <= m; ++o) {
        if (o > 0 && used[o]) continue;
        const double e = eta[members[a]][o];
        if (!(e > 0.0)) continue;
        if (o > 0) used[o] = 1;
        theta[a] = o;
        rec(a + 1, w * e);
        if (o > 0) used[o] = 0;
      }
    };
    rec(0, w_subset);
  }
  UpdateResult out;
  out.r.resize(n);
  out.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.r[i] = r_post[i] / total;
    std::vector<double> w(comps[i].w.size(), 0.0);
    if (r_post[i] > 0.0) {
      for (std::size_t o = 0; o <= m; ++o) {
        if (!(mass[i][o] > 0.0)) continue;
        for (std::size_t j = 0; j < w.size(); ++j) {
          w[j] += mass[i][o] / r_post[i] * comps[i].w[j] * psi[i][o][j] / eta[i][o];
        }
      }
      double sum = 0.0;
      for (double v : w) sum += v;
      for (double& v : w) v /= sum;
    }
    out.w[i] = std::move(w);
  }
  return out;
}

/// Location error of one weighted particle cloud, evaluated term by term.
inline double state_error_term(const std::vector<double>& w, const std::vector<double>& x,
                               const std::vector<double>& y) {
  const double j = static_cast<double>(w.size());
  double ex = 0.0, ey = 0.0, ex2 = 0.0, ey2 = 0.0, sx2 = 0.0, sy2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    ex += w[i] * x[i];
    ey += w[i] * y[i];
    ex2 += w[i] * x[i] * x[i];
    ey2 += w[i] * y[i] * y[i];
    sx2 += x[i] * x[i];
    sy2 += y[i] * y[i];
  }
  const double vx = ex2 - ex * ex;
  const double vy = ey2 - ey * ey;
  const double mx = (1.0 / j) * (1.0 - 1.0 / j) * sx2;
  const double my = (1.0 / j) * (1.0 - 1.0 / j) * sy2;
  return (vx * vy) / (mx * my);
}

/// Kolmogorov-Smirnov statistic of a sample against Uniform(a, b).
inline double ks_uniform(std::vector<double> v, double a, double b) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = (v[i] - a) / (b - a);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace peecs::oracle

#endif  // PEECS_TESTS_ORACLES_HPP_
