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

#ifndef PEECS_LMB_FILTER_HPP_
#define PEECS_LMB_FILTER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include "peecs/assignment.hpp"
#include "peecs/models.hpp"
#include "peecs/rfs_types.hpp"

namespace peecs {

/// No hypothesis survived truncation, so no posterior can be formed.
class UpdateDegenerateError : public Error {
 public:
  using Error::Error;
};

struct TruncationConfig {
  std::size_t k_subsets{100};
  std::size_t m_assignments{100};
  double prune_r{1e-3};
  std::size_t max_particles{1000};
  /// Pairs whose Mahalanobis residual exceeds this many standard deviations
  /// are treated as impossible associations. Non-positive disables gating.
  double gate_sigma{6.0};

  void validate() const {
    if (k_subsets == 0 || m_assignments == 0 || max_particles == 0 || !(prune_r > 0.0)) {
      throw Error("truncation config: all limits must be positive");
    }
  }
};

// ---------------------------------------------------------------------------
// Particle utilities
// ---------------------------------------------------------------------------

/// Systematic resampling to `n` equally weighted particles.
template <class Rng>
[[nodiscard]] ParticleDensity resample(const ParticleDensity& density, std::size_t n, Rng& rng) {
  const double total = density.total_weight();
  if (density.empty() || !(total > 0.0)) {
    throw DegenerateDensityError("cannot resample a density with no mass");
  }
  const auto particles = density.particles();
  std::uniform_real_distribution<double> uniform{0.0, 1.0};
  const double step = 1.0 / static_cast<double>(n);
  const double start = uniform(rng) * step;
  const double w = 1.0 / static_cast<double>(n);
  std::vector<Particle> out;
  out.reserve(n);
  std::size_t i = 0;
  double cumulative = particles[0].weight / total;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = start + static_cast<double>(k) * step;
    while (u > cumulative && i + 1 < particles.size()) {
      ++i;
      cumulative += particles[i].weight / total;
    }
    out.push_back(Particle{w, particles[i].state});
  }
  return ParticleDensity{std::move(out)};
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

/// Survivors keep their labels with r scaled by p_S and particles moved
/// through the transition kernel; births join with labels (k, index).
template <class Rng>
[[nodiscard]] LmbDensity predict(const LmbDensity& prior, const BirthModel& birth,
                                 const MotionModel& motion, std::int64_t k, Rng& rng) {
  std::vector<LmbComponent> out;
  out.reserve(prior.size() + birth.components.size());
  for (const auto& c : prior.components()) {
    std::vector<Particle> moved;
    moved.reserve(c.density.size());
    for (const auto& p : c.density.particles()) {
      moved.push_back(Particle{p.weight, propagate(p.state, motion, rng)});
    }
    // Constant survival probability leaves the normalized weights unchanged.
    out.push_back(
        LmbComponent{c.label, motion.survival_prob * c.r, normalize(ParticleDensity{std::move(moved)})});
  }
  for (const auto& b : birth.components) {
    out.push_back(LmbComponent{Label{k, b.label_index}, b.r, b.density});
  }
  return LmbDensity{std::move(out)};
}

// ---------------------------------------------------------------------------
// K-best label subsets
// ---------------------------------------------------------------------------

/// A label subset of a predicted density with its prior weight.
struct LabelSubset {
  std::vector<std::size_t> indices;  ///< component indices, ascending (= label order)
  double weight{0.0};
};

namespace detail {

inline double subset_weight_from_mask(std::span<const LmbComponent> components,
                                      const std::vector<char>& included) {
  double weight = 1.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const double r = clamp_existence(components[i].r);
    weight *= included[i] ? r : 1.0 - r;
  }
  return weight;
}

}  // namespace detail

/// The `k` label subsets with the largest product-form weight, heaviest first;
/// equal weights are ordered lexicographically by their sorted label lists.
///
/// Every subset is the most likely subset with a set of "flipped" decisions,
/// each flip costing |log(r / (1 - r))|. Flip sets are enumerated in order of
/// total cost with the usual extend-or-replace successor scheme, which is exact.
[[nodiscard]] inline std::vector<LabelSubset> top_k_label_subsets(const LmbDensity& pred,
                                                                  std::size_t k) {
  if (k == 0) throw Error("top_k_label_subsets: k must be at least 1");
  const auto comps = pred.components();
  const std::size_t n = comps.size();

  std::vector<char> base(n, 0);
  std::vector<double> flip_cost(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = clamp_existence(comps[i].r);
    base[i] = r > 0.5 ? 1 : 0;
    flip_cost[i] = std::abs(std::log(r) - std::log1p(-r));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return flip_cost[a] < flip_cost[b]; });

  struct Entry {
    double cost;
    std::vector<std::size_t> flips;  // positions into `order`, ascending
  };
  auto heavier = [](const Entry& a, const Entry& b) { return a.cost > b.cost; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(heavier)> queue(heavier);

  std::vector<Entry> found;
  found.push_back(Entry{0.0, {}});
  if (n > 0) queue.push(Entry{flip_cost[order[0]], {0}});

  // Collect beyond k while costs tie with the k-th so the tie rule can be applied.
  constexpr std::size_t kTieCap = 100000;
  while (!queue.empty()) {
    if (found.size() >= k) {
      const double kth = found[k - 1].cost;
      if (queue.top().cost > kth + 1e-9 * (1.0 + std::abs(kth))) break;
      if (found.size() >= k + kTieCap) break;
    }
    Entry e = queue.top();
    queue.pop();
    const std::size_t last = e.flips.back();
    if (last + 1 < n) {
      Entry extend = e;
      extend.flips.push_back(last + 1);
      extend.cost += flip_cost[order[last + 1]];
      Entry replace = e;
      replace.flips.back() = last + 1;
      replace.cost += flip_cost[order[last + 1]] - flip_cost[order[last]];
      queue.push(std::move(extend));
      queue.push(std::move(replace));
    }
    found.push_back(std::move(e));
  }

  std::vector<LabelSubset> subsets;
  subsets.reserve(found.size());
  for (const auto& e : found) {
    std::vector<char> included = base;
    for (const std::size_t pos : e.flips) included[order[pos]] ^= 1;
    LabelSubset s;
    for (std::size_t i = 0; i < n; ++i) {
      if (included[i]) s.indices.push_back(i);
    }
    s.weight = detail::subset_weight_from_mask(comps, included);
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end(), [](const LabelSubset& a, const LabelSubset& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.indices < b.indices;
  });
  if (subsets.size() > k) subsets.resize(k);
  return subsets;
}

// ---------------------------------------------------------------------------
// Update
// ---------------------------------------------------------------------------

/// psi_Z(x; j): missed-detection probability for j = 0, otherwise
/// p_D(x) g(z_j | x) / kappa(z_j) for the j-th measurement (1-based).
[[nodiscard]] inline double psi_z(const SingleTargetState& x, const SensorState& sensor,
                                  std::size_t z_index, std::span<const Measurement> measurements,
                                  const MeasurementModel& meas) {
  if (z_index > measurements.size()) throw Error("psi_z: measurement index out of range");
  const double pd = detection_prob(sensor, x, meas);
  if (z_index == 0) return 1.0 - pd;
  if (pd == 0.0) return 0.0;
  const Measurement& z = measurements[z_index - 1];
  const double kappa = clutter_intensity(z, meas);
  if (!(kappa > 0.0)) throw Error("psi_z: measurement outside the clutter region");
  return pd * likelihood(z, sensor, x, meas) / kappa;
}

/// Per-(component, option) association likelihoods eta = <p_+, psi_Z>.
/// Option 0 is a missed detection, option j >= 1 the j-th measurement.
struct AssociationTable {
  std::size_t n_components{0};
  std::size_t n_measurements{0};
  std::vector<double> eta;  ///< row-major n_components x (n_measurements + 1)

  [[nodiscard]] double operator()(std::size_t component, std::size_t option) const {
    return eta[component * (n_measurements + 1) + option];
  }
  double& operator()(std::size_t component, std::size_t option) {
    return eta[component * (n_measurements + 1) + option];
  }
};

namespace detail {

// Squared Mahalanobis distance of z from the particle-predicted measurement
// distribution (moment-matched, measurement noise added).
inline double gate_distance2(const ParticleDensity& density, const std::vector<Measurement>& h,
                             const Measurement& z, const MeasurementModel& meas) {
  const auto particles = density.particles();
  const double ref = h.front().bearing;
  double mb = 0.0;
  double mr = 0.0;
  for (std::size_t j = 0; j < particles.size(); ++j) {
    mb += particles[j].weight * wrap_angle(h[j].bearing - ref);
    mr += particles[j].weight * h[j].range;
  }
  double sbb = 0.0;
  double srr = 0.0;
  double sbr = 0.0;
  for (std::size_t j = 0; j < particles.size(); ++j) {
    const double db = wrap_angle(h[j].bearing - ref) - mb;
    const double dr = h[j].range - mr;
    sbb += particles[j].weight * db * db;
    srr += particles[j].weight * dr * dr;
    sbr += particles[j].weight * db * dr;
  }
  sbb += meas.sigma_bearing * meas.sigma_bearing;
  srr += meas.sigma_range * meas.sigma_range;
  const double det = sbb * srr - sbr * sbr;
  const double eb = wrap_angle(z.bearing - (ref + mb));
  const double er = z.range - mr;
  return (srr * eb * eb - 2.0 * sbr * eb * er + sbb * er * er) / det;
}

}  // namespace detail

[[nodiscard]] inline AssociationTable build_association_table(
    std::span<const LmbComponent> components, std::span<const Measurement> measurements,
    const SensorState& sensor, const MeasurementModel& meas, double gate_sigma) {
  for (const auto& z : measurements) {
    if (!(clutter_intensity(z, meas) > 0.0)) {
      throw Error("update: measurement outside the clutter region");
    }
  }
  AssociationTable table;
  table.n_components = components.size();
  table.n_measurements = measurements.size();
  table.eta.assign(components.size() * (measurements.size() + 1), 0.0);
  const double gate2 = gate_sigma * gate_sigma;
  std::vector<double> pd;
  std::vector<Measurement> h;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto particles = components[i].density.particles();
    pd.resize(particles.size());
    h.resize(particles.size());
    double miss = 0.0;
    bool any_detectable = false;
    for (std::size_t j = 0; j < particles.size(); ++j) {
      h[j] = ideal_measurement(sensor, particles[j].state);
      pd[j] = detection_prob(h[j].range, meas);
      miss += particles[j].weight * (1.0 - pd[j]);
      any_detectable = any_detectable || pd[j] > 0.0;
    }
    table(i, 0) = miss;
    if (!any_detectable) continue;
    const double norm = 1.0 / (2.0 * std::numbers::pi * meas.sigma_bearing * meas.sigma_range);
    for (std::size_t z = 0; z < measurements.size(); ++z) {
      const Measurement& zm = measurements[z];
      if (gate_sigma > 0.0 &&
          detail::gate_distance2(components[i].density, h, zm, meas) > gate2) {
        continue;
      }
      const double kappa = clutter_intensity(zm, meas);
      double eta = 0.0;
      for (std::size_t j = 0; j < particles.size(); ++j) {
        if (pd[j] == 0.0) continue;
        const double dr = (zm.range - h[j].range) / meas.sigma_range;
        if (dr * dr > 1500.0) continue;  // exp(-0.5 * q) is exactly zero
        const double db = wrap_angle(zm.bearing - h[j].bearing) / meas.sigma_bearing;
        eta += particles[j].weight * pd[j] * norm * std::exp(-0.5 * (db * db + dr * dr));
      }
      table(i, z + 1) = eta / kappa;
    }
  }
  return table;
}

/// (I+, theta, weight): association[a] is the option (0 = miss, j = measurement j)
/// of the a-th component in `indices`.
struct Hypothesis {
  std::vector<std::size_t> indices;
  std::vector<std::size_t> association;
  double weight{0.0};
};

/// Cost matrix for ranked assignment of the components in `indices`:
/// columns [0, m) are measurements, column m + a is the miss slot of row a.
[[nodiscard]] inline CostMatrix association_cost_matrix(const AssociationTable& table,
                                                        std::span<const std::size_t> indices) {
  const std::size_t s = indices.size();
  const std::size_t m = table.n_measurements;
  CostMatrix cost(s, m + s, kInfeasible);
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t j = 0; j < m; ++j) {
      const double eta = table(indices[a], j + 1);
      cost(a, j) = eta > 0.0 ? -std::log(eta) : kInfeasible;
    }
    const double miss = table(indices[a], 0);
    cost(a, m + a) = miss > 0.0 ? -std::log(miss) : kInfeasible;
  }
  return cost;
}

/// Two-stage truncated hypothesis set (top subsets, then ranked associations
/// per subset), renormalized over everything that was kept.
[[nodiscard]] inline std::vector<Hypothesis> enumerate_hypotheses(const LmbDensity& pred,
                                                                  const AssociationTable& table,
                                                                  const TruncationConfig& trunc) {
  const std::size_t m = table.n_measurements;
  std::vector<Hypothesis> hyps;
  std::vector<double> log_weights;
  for (const auto& subset : top_k_label_subsets(pred, trunc.k_subsets)) {
    if (!(subset.weight > 0.0)) continue;
    const double log_w = std::log(subset.weight);
    const CostMatrix cost = association_cost_matrix(table, subset.indices);
    for (const auto& assignment : ranked_assignments(cost, trunc.m_assignments)) {
      Hypothesis h;
      h.indices = subset.indices;
      h.association.reserve(subset.indices.size());
      for (const int col : assignment.row_to_col) {
        const auto c = static_cast<std::size_t>(col);
        h.association.push_back(c < m ? c + 1 : 0);
      }
      hyps.push_back(std::move(h));
      log_weights.push_back(log_w - assignment.cost);
    }
  }
  if (hyps.empty()) throw UpdateDegenerateError("no feasible hypothesis after truncation");
  const double max_log = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(max_log)) throw UpdateDegenerateError("hypothesis weights are not finite");
  double total = 0.0;
  for (std::size_t h = 0; h < hyps.size(); ++h) {
    hyps[h].weight = std::exp(log_weights[h] - max_log);
    total += hyps[h].weight;
  }
  for (auto& h : hyps) h.weight /= total;
  return hyps;
}

/// Collapses a normalized hypothesis set into the posterior LMB: r is the
/// mass of hypotheses containing the label and the density is the matching
/// mixture of measurement-updated particle densities. No pruning or resampling.
[[nodiscard]] inline LmbDensity posterior_from_hypotheses(
    const LmbDensity& pred, const AssociationTable& table, std::span<const Hypothesis> hyps,
    std::span<const Measurement> measurements, const SensorState& sensor,
    const MeasurementModel& meas) {
  const std::size_t n = pred.size();
  const std::size_t options = table.n_measurements + 1;
  std::vector<double> mass(n * options, 0.0);
  std::vector<double> r(n, 0.0);
  for (const auto& h : hyps) {
    for (std::size_t a = 0; a < h.indices.size(); ++a) {
      r[h.indices[a]] += h.weight;
      mass[h.indices[a] * options + h.association[a]] += h.weight;
    }
  }
  std::vector<LmbComponent> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LmbComponent& c = pred[i];
    if (!(r[i] > 0.0)) {
      out.push_back(LmbComponent{c.label, 0.0, c.density});
      continue;
    }
    const auto particles = c.density.particles();
    std::vector<double> weights(particles.size(), 0.0);
    for (std::size_t opt = 0; opt < options; ++opt) {
      const double w = mass[i * options + opt];
      if (!(w > 0.0)) continue;
      const double scale = w / table(i, opt) / r[i];
      for (std::size_t j = 0; j < particles.size(); ++j) {
        weights[j] += scale * particles[j].weight *
                      psi_z(particles[j].state, sensor, opt, measurements, meas);
      }
    }
    std::vector<Particle> updated(particles.begin(), particles.end());
    for (std::size_t j = 0; j < updated.size(); ++j) updated[j].weight = weights[j];
    out.push_back(LmbComponent{c.label, std::min(r[i], 1.0), normalize(ParticleDensity{std::move(updated)})});
  }
  return LmbDensity{std::move(out)};
}

/// Drops components with r below the threshold and resamples the rest.
template <class Rng>
[[nodiscard]] LmbDensity prune_and_resample(const LmbDensity& density, const TruncationConfig& trunc,
                                            Rng& rng) {
  std::vector<LmbComponent> kept;
  for (const auto& c : density.components()) {
    if (c.r < trunc.prune_r) continue;
    kept.push_back(LmbComponent{c.label, c.r, resample(c.density, trunc.max_particles, rng)});
  }
  return LmbDensity{std::move(kept)};
}

/// Full LMB measurement update for one scan.
template <class Rng>
[[nodiscard]] LmbDensity update(const LmbDensity& pred, std::span<const Measurement> measurements,
                                const SensorState& sensor, const MeasurementModel& meas,
                                const TruncationConfig& trunc, Rng& rng) {
  const AssociationTable table =
      build_association_table(pred.components(), measurements, sensor, meas, trunc.gate_sigma);
  const std::vector<Hypothesis> hyps = enumerate_hypotheses(pred, table, trunc);
  const LmbDensity posterior =
      posterior_from_hypotheses(pred, table, hyps, measurements, sensor, meas);
  return prune_and_resample(posterior, trunc, rng);
}

// ---------------------------------------------------------------------------
// Track extraction
// ---------------------------------------------------------------------------

struct Track {
  Label label{};
  SingleTargetState state{};
};

/// One EAP estimate per component whose existence exceeds `threshold`.
[[nodiscard]] inline std::vector<Track> extract_tracks(const LmbDensity& post, double threshold) {
  std::vector<Track> tracks;
  for (const auto& c : post.components()) {
    if (c.r > threshold) tracks.push_back(Track{c.label, eap_estimate(c.density)});
  }
  return tracks;
}

}  // namespace peecs

#endif  // PEECS_LMB_FILTER_HPP_
