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

#ifndef PEECS_SENSOR_CONTROL_HPP_
#define PEECS_SENSOR_CONTROL_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "peecs/cbmember.hpp"
#include "peecs/models.hpp"
#include "peecs/rfs_types.hpp"

namespace peecs {

/// Sensor displacement (m).
struct SensorCommand {
  double dx{0.0};
  double dy{0.0};

  friend constexpr bool operator==(const SensorCommand&, const SensorCommand&) = default;
};

[[nodiscard]] constexpr SensorState apply(const SensorState& s, const SensorCommand& c) noexcept {
  return SensorState{s.x + c.dx, s.y + c.dy};
}

struct ControlConfig {
  double eta{0.5};
  std::vector<double> move_radii{25.0, 50.0};
  int n_directions{8};
  bool include_stay{true};
  /// Existence threshold for the pre-estimates that seed the ideal measurements.
  double estimate_threshold{0.5};
  /// Existence threshold for measurement-updated components in the control loop.
  double prune_updated_r{1e-4};

  void validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw Error("control config: eta outside [0, 1]");
    for (const double r : move_radii) {
      if (!(r > 0.0)) throw Error("control config: move radii must be positive");
    }
    if (n_directions < 0) throw Error("control config: negative direction count");
    if (!include_stay && (move_radii.empty() || n_directions == 0)) {
      throw Error("control config: empty command set");
    }
  }
};

/// Stay (if enabled), then n equally spaced headings for each radius in turn.
[[nodiscard]] inline std::vector<SensorCommand> admissible_commands(const ControlConfig& cfg) {
  std::vector<SensorCommand> commands;
  if (cfg.include_stay) commands.push_back(SensorCommand{0.0, 0.0});
  for (const double radius : cfg.move_radii) {
    for (int j = 0; j < cfg.n_directions; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / cfg.n_directions;
      commands.push_back(SensorCommand{radius * std::cos(phi), radius * std::sin(phi)});
    }
  }
  return commands;
}

/// EAP states of the components that are more likely present than `threshold`.
[[nodiscard]] inline std::vector<SingleTargetState> pre_estimate(const MbDensity& pred,
                                                                 double threshold) {
  std::vector<SingleTargetState> out;
  for (const auto& c : pred.components) {
    if (c.r > threshold) out.push_back(eap_estimate(c.density));
  }
  return out;
}

/// Predicted ideal measurement set: one noise-free, clutter-free measurement
/// per estimate that the sensor could detect from `sensor_after`.
[[nodiscard]] inline std::vector<Measurement> pims(std::span<const SingleTargetState> estimates,
                                                   const SensorState& sensor_after,
                                                   const MeasurementModel& meas) {
  std::vector<Measurement> out;
  for (const auto& x : estimates) {
    if (!(detection_prob(sensor_after, x, meas) > 0.0)) continue;
    const Measurement z = ideal_measurement(sensor_after, x);
    if (meas.region.contains(z)) out.push_back(z);
  }
  return out;
}

/// Normalized expected cardinality variance, 4/M sum r(1 - r). Zero for an empty density.
[[nodiscard]] inline double cardinality_error(const MbDensity& post) noexcept {
  const std::size_t m = post.components.size();
  if (m == 0) return 0.0;
  double variance = 0.0;
  for (const auto& c : post.components) variance += c.r * (1.0 - c.r);
  return 4.0 * variance / static_cast<double>(m);
}

/// Normalized location error of one Bernoulli component: the product of the
/// weighted x and y variances over the product of their equal-weight bounds
/// (1/J)(1 - 1/J) sum x_j^2, clipped to [0, 1].
[[nodiscard]] inline double component_state_error(const ParticleDensity& density) {
  const auto particles = density.particles();
  const double total = density.total_weight();
  if (particles.empty() || !(total > 0.0)) return 1.0;
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, raw_x = 0.0, raw_y = 0.0;
  for (const auto& p : particles) {
    const double w = p.weight / total;
    mx += w * p.state.x;
    my += w * p.state.y;
    sxx += w * p.state.x * p.state.x;
    syy += w * p.state.y * p.state.y;
    raw_x += p.state.x * p.state.x;
    raw_y += p.state.y * p.state.y;
  }
  const double var_x = std::max(0.0, sxx - mx * mx);
  const double var_y = std::max(0.0, syy - my * my);
  const double j = static_cast<double>(particles.size());
  const double bound = (1.0 / j) * (1.0 - 1.0 / j);
  const double max_x = bound * raw_x;
  const double max_y = bound * raw_y;
  const double num = var_x * var_y;
  if (num == 0.0) return 0.0;
  const double den = max_x * max_y;
  if (!(den > 0.0)) return 1.0;
  return std::clamp(num / den, 0.0, 1.0);
}

/// Existence-weighted mean of the per-component state errors; 1 when no mass remains.
[[nodiscard]] inline double state_error(const MbDensity& post) {
  double sum_r = 0.0;
  double weighted = 0.0;
  for (const auto& c : post.components) {
    if (!(c.r > 0.0)) continue;
    sum_r += c.r;
    weighted += c.r * component_state_error(c.density);
  }
  if (!(sum_r > 0.0)) return 1.0;
  return std::clamp(weighted / sum_r, 0.0, 1.0);
}

[[nodiscard]] inline double peecs_cost(double cardinality_err, double state_err, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error("peecs_cost: eta outside [0, 1]");
  return eta * cardinality_err + (1.0 - eta) * state_err;
}

[[nodiscard]] inline double peecs_cost(const MbDensity& post, double eta) {
  return peecs_cost(cardinality_error(post), state_error(post), eta);
}

struct CommandCost {
  SensorCommand command{};
  double cardinality_error{0.0};
  double state_error{0.0};
  double cost{0.0};
};

struct CommandSelection {
  std::size_t index{0};
  SensorCommand command{};
  std::vector<CommandCost> table;
};

/// Index of the smallest cost; the earliest command wins ties.
[[nodiscard]] inline std::size_t argmin_cost(std::span<const double> costs) {
  if (costs.empty()) throw Error("argmin_cost: no commands");
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i] < costs[best]) best = i;
  }
  return best;
}

/// Cost of one candidate command: ideal measurements from the moved sensor,
/// a multi-Bernoulli update with them, and the PEECS cost of the result.
[[nodiscard]] inline CommandCost evaluate_command(const MbDensity& pred,
                                                  std::span<const SingleTargetState> estimates,
                                                  const SensorState& sensor,
                                                  const SensorCommand& command,
                                                  const ControlConfig& cfg,
                                                  const MeasurementModel& meas) {
  const SensorState moved = apply(sensor, command);
  const std::vector<Measurement> ideal = pims(estimates, moved, meas);
  const MbDensity post = cbmember_update(pred, ideal, moved, meas, {cfg.prune_updated_r});
  CommandCost out;
  out.command = command;
  out.cardinality_error = cardinality_error(post);
  out.state_error = state_error(post);
  out.cost = peecs_cost(out.cardinality_error, out.state_error, cfg.eta);
  return out;
}

/// Evaluates every admissible command against the predicted density and
/// returns the cheapest one with the full cost table.
[[nodiscard]] inline CommandSelection select_command(const LmbDensity& pred,
                                                     const SensorState& sensor,
                                                     const ControlConfig& cfg,
                                                     const MeasurementModel& meas) {
  const std::vector<SensorCommand> commands = admissible_commands(cfg);
  if (commands.empty()) throw Error("select_command: empty command set");
  const MbDensity mb = strip_labels(pred);
  const std::vector<SingleTargetState> estimates = pre_estimate(mb, cfg.estimate_threshold);
  CommandSelection sel;
  sel.table.reserve(commands.size());
  std::vector<double> costs;
  costs.reserve(commands.size());
  for (const auto& command : commands) {
    sel.table.push_back(evaluate_command(mb, estimates, sensor, command, cfg, meas));
    costs.push_back(sel.table.back().cost);
  }
  sel.index = argmin_cost(costs);
  sel.command = commands[sel.index];
  return sel;
}

}  // namespace peecs

#endif  // PEECS_SENSOR_CONTROL_HPP_
