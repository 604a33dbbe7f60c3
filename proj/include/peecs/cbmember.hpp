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

#ifndef PEECS_CBMEMBER_HPP_
#define PEECS_CBMEMBER_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "peecs/models.hpp"
#include "peecs/rfs_types.hpp"

namespace peecs {

/// Drops labels; (r, density) pairs keep label order.
[[nodiscard]] inline MbDensity strip_labels(const LmbDensity& pred) {
  MbDensity mb;
  mb.components.reserve(pred.size());
  for (const auto& c : pred.components()) mb.components.push_back(BernoulliComponent{c.r, c.density});
  return mb;
}

struct CbMemberOptions {
  /// Measurement-updated components below this existence are dropped.
  double prune_updated_r{1e-4};
};

/// Cardinality-balanced multi-Bernoulli update (SMC form).
///
/// Legacy components:
///   r_L = r (1 - rho_L) / (1 - r rho_L),  rho_L = sum_j w_j p_D(x_j),
///   weights proportional to w_j (1 - p_D(x_j)).
/// One component per measurement z:
///   r_U = [sum_i r_i (1 - r_i) rho_i(z) / (1 - r_i rho_L,i)^2]
///         / [kappa(z) + sum_i r_i rho_i(z) / (1 - r_i rho_L,i)],
///   rho_i(z) = sum_j w_j p_D(x_j) g(z | x_j),
///   particles pooled over all i with weights r_i / (1 - r_i) w_j p_D g(z | x_j).
[[nodiscard]] inline MbDensity cbmember_update(const MbDensity& pred,
                                               std::span<const Measurement> measurements,
                                               const SensorState& sensor,
                                               const MeasurementModel& meas,
                                               const CbMemberOptions& options = {}) {
  const std::size_t n = pred.components.size();
  const std::size_t m = measurements.size();
  MbDensity post;
  post.components.reserve(n + m);

  std::vector<std::vector<double>> pd(n);
  std::vector<std::vector<Measurement>> h(n);
  std::vector<double> rho_l(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto particles = pred.components[i].density.particles();
    pd[i].resize(particles.size());
    if (!measurements.empty()) h[i].resize(particles.size());
    for (std::size_t j = 0; j < particles.size(); ++j) {
      const Measurement ideal = ideal_measurement(sensor, particles[j].state);
      pd[i][j] = detection_prob(ideal.range, meas);
      if (!measurements.empty()) h[i][j] = ideal;
      rho_l[i] += particles[j].weight * pd[i][j];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = pred.components[i];
    const double r = c.r;
    double r_legacy = r * (1.0 - rho_l[i]) / (1.0 - r * rho_l[i]);
    if (!std::isfinite(r_legacy)) r_legacy = 0.0;  // r = 1 and rho_L = 1
    const auto particles = c.density.particles();
    std::vector<Particle> updated(particles.begin(), particles.end());
    double total = 0.0;
    for (std::size_t j = 0; j < updated.size(); ++j) {
      updated[j].weight *= 1.0 - pd[i][j];
      total += updated[j].weight;
    }
    if (total > 0.0) {
      post.components.push_back(
          BernoulliComponent{std::clamp(r_legacy, 0.0, 1.0), normalize(ParticleDensity{std::move(updated)})});
    } else {
      // Certain detection: the legacy track cannot persist undetected.
      post.components.push_back(BernoulliComponent{0.0, c.density});
    }
  }

  std::vector<double> rho_u(n);
  for (const auto& z : measurements) {
    const double kappa = clutter_intensity(z, meas);
    double numerator = 0.0;
    double denominator = kappa;
    std::vector<Particle> pooled;
    pooled.reserve(n == 0 ? 0 : n * pred.components.front().density.size());
    double pooled_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = pred.components[i];
      const double r = clamp_existence(c.r);
      const auto particles = c.density.particles();
      std::vector<double> g(particles.size(), 0.0);
      double rho = 0.0;
      for (std::size_t j = 0; j < particles.size(); ++j) {
        if (pd[i][j] == 0.0) continue;
        g[j] = pd[i][j] * likelihood(z, h[i][j], meas);
        rho += particles[j].weight * g[j];
      }
      if (!(rho > 0.0)) continue;
      const double one_minus = 1.0 - r * rho_l[i];
      numerator += r * (1.0 - r) * rho / (one_minus * one_minus);
      denominator += r * rho / one_minus;
      const double odds = r / (1.0 - r);
      for (std::size_t j = 0; j < particles.size(); ++j) {
        const double w = odds * particles[j].weight * g[j];
        if (w > 0.0) {
          pooled.push_back(Particle{w, particles[j].state});
          pooled_total += w;
        }
      }
    }
    if (!(denominator > 0.0) || !(pooled_total > 0.0)) continue;
    const double r_u = std::clamp(numerator / denominator, 0.0, 1.0);
    if (r_u < options.prune_updated_r) continue;
    post.components.push_back(BernoulliComponent{r_u, normalize(ParticleDensity{std::move(pooled)})});
  }
  return post;
}

}  // namespace peecs

#endif  // PEECS_CBMEMBER_HPP_
