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

#ifndef PEECS_MODELS_HPP_
#define PEECS_MODELS_HPP_

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "peecs/rfs_types.hpp"

namespace peecs {

/// Bearing is undefined when target and sensor coincide.
class UndefinedBearingError : public Error {
 public:
  using Error::Error;
};

/// Planar sensor position (m).
struct SensorState {
  double x{0.0};
  double y{0.0};

  friend constexpr bool operator==(const SensorState&, const SensorState&) = default;
};

/// Range-bearing measurement. Bearing is measured from the +y axis towards +x.
struct Measurement {
  double bearing{0.0};  ///< rad
  double range{0.0};    ///< m

  friend constexpr bool operator==(const Measurement&, const Measurement&) = default;
};

/// Wraps an angle into (-pi, pi].
[[nodiscard]] inline double wrap_angle(double a) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

// ---------------------------------------------------------------------------
// Motion
// ---------------------------------------------------------------------------

struct MotionModel {
  double period{1.0};                                 ///< T (s)
  double sigma_accel{15.0};                           ///< m/s^2
  double sigma_turn{std::numbers::pi / 180.0};        ///< rad/s
  double survival_prob{0.99};

  void validate() const {
    if (!(period > 0.0)) throw Error("motion model: period must be positive");
    if (!(sigma_accel >= 0.0) || !(sigma_turn >= 0.0)) {
      throw Error("motion model: noise standard deviations must be non-negative");
    }
    if (!(survival_prob >= 0.0 && survival_prob <= 1.0)) {
      throw Error("motion model: survival probability outside [0, 1]");
    }
  }
};

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Coordinated-turn transition for [x y vx vy]. Falls back to the
/// constant-velocity limit when |omega * T| < 1e-6.
[[nodiscard]] inline Matrix4 ct_transition_matrix(double omega, double period) {
  const double wt = omega * period;
  double s_over_w = period;  // sin(wT)/w
  double c_over_w = 0.0;     // (1 - cos(wT))/w
  double c = 1.0;
  double s = 0.0;
  if (std::abs(wt) >= 1e-6) {
    s = std::sin(wt);
    c = std::cos(wt);
    s_over_w = s / omega;
    c_over_w = (1.0 - c) / omega;
  }
  return Matrix4{{{1.0, 0.0, s_over_w, -c_over_w},
                  {0.0, 1.0, c_over_w, s_over_w},
                  {0.0, 0.0, c, -s},
                  {0.0, 0.0, s, c}}};
}

/// Deterministic coordinated-turn step (no process noise).
[[nodiscard]] inline SingleTargetState ct_step(const SingleTargetState& state, double period) {
  const Matrix4 f = ct_transition_matrix(state.omega, period);
  const std::array<double, 4> v{state.x, state.y, state.vx, state.vy};
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out[i] += f[i][j] * v[j];
  }
  return SingleTargetState{out[0], out[1], out[2], out[3], state.omega};
}

/// One noisy step of the nearly-constant-turn model.
template <class Rng>
[[nodiscard]] SingleTargetState propagate(const SingleTargetState& state, const MotionModel& model,
                                          Rng& rng) {
  SingleTargetState next = ct_step(state, model.period);
  std::normal_distribution<double> unit{0.0, 1.0};
  const double ex = model.sigma_accel * unit(rng);
  const double ey = model.sigma_accel * unit(rng);
  const double gamma = model.sigma_turn * unit(rng);
  const double half_t2 = 0.5 * model.period * model.period;
  next.x += half_t2 * ex;
  next.y += half_t2 * ey;
  next.vx += model.period * ex;
  next.vy += model.period * ey;
  next.omega += model.period * gamma;
  return next;
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// Rectangle in measurement space: bearing interval x range interval.
struct MeasurementRegion {
  double bearing_min{-std::numbers::pi};
  double bearing_max{std::numbers::pi};
  double range_min{0.0};
  double range_max{2000.0};

  [[nodiscard]] bool contains(const Measurement& z) const noexcept {
    return z.bearing >= bearing_min && z.bearing <= bearing_max && z.range >= range_min &&
           z.range <= range_max;
  }
  [[nodiscard]] double area() const noexcept {
    return (bearing_max - bearing_min) * (range_max - range_min);
  }
};

struct MeasurementModel {
  double sigma_bearing{std::numbers::pi / 180.0};  ///< rad
  double sigma_range{5.0};                         ///< m
  double full_detection_radius{300.0};             ///< R0 (m)
  double detection_slope{0.001};                   ///< h (1/m)
  double clutter_rate{1.6e-3};                     ///< lambda_c, (rad m)^-1
  MeasurementRegion region{};

  void validate() const {
    if (!(sigma_bearing > 0.0) || !(sigma_range > 0.0)) {
      throw Error("measurement model: noise standard deviations must be positive");
    }
    if (!(full_detection_radius >= 0.0) || !(detection_slope >= 0.0) || !(clutter_rate >= 0.0)) {
      throw Error("measurement model: R0, h and clutter rate must be non-negative");
    }
    if (!(region.bearing_max > region.bearing_min) || !(region.range_max > region.range_min)) {
      throw Error("measurement model: empty surveillance region");
    }
  }
};

/// Noise-free measurement of a target relative to the sensor. The bearing is
/// measured from the +y axis towards +x; atan2(0, 0) = 0.
[[nodiscard]] inline Measurement ideal_measurement(const SensorState& sensor, double tx,
                                                   double ty) noexcept {
  const double dx = tx - sensor.x;
  const double dy = ty - sensor.y;
  return Measurement{std::atan2(dx, dy), std::hypot(dx, dy)};
}

[[nodiscard]] inline Measurement ideal_measurement(const SensorState& sensor,
                                                   const SingleTargetState& target) noexcept {
  return ideal_measurement(sensor, target.x, target.y);
}

/// Detection profile: 1 within R0, then a linear decay with slope h down to 0.
[[nodiscard]] inline double detection_prob(double distance, const MeasurementModel& model) noexcept {
  if (distance <= model.full_detection_radius) return 1.0;
  return std::max(0.0, 1.0 - model.detection_slope * (distance - model.full_detection_radius));
}

[[nodiscard]] inline double detection_prob(const SensorState& sensor, double tx, double ty,
                                           const MeasurementModel& model) noexcept {
  return detection_prob(std::hypot(tx - sensor.x, ty - sensor.y), model);
}

[[nodiscard]] inline double detection_prob(const SensorState& sensor,
                                           const SingleTargetState& target,
                                           const MeasurementModel& model) noexcept {
  return detection_prob(sensor, target.x, target.y, model);
}

/// Distance beyond which the detection probability is zero.
[[nodiscard]] inline double detection_cutoff(const MeasurementModel& model) noexcept {
  if (model.detection_slope <= 0.0) return std::numeric_limits<double>::infinity();
  return model.full_detection_radius + 1.0 / model.detection_slope;
}

/// Noisy range-bearing measurement of `target` from `sensor`.
template <class Rng>
[[nodiscard]] Measurement measure(const SensorState& sensor, const SingleTargetState& target,
                                  const MeasurementModel& model, Rng& rng) {
  if (target.x == sensor.x && target.y == sensor.y) {
    throw UndefinedBearingError("target coincides with the sensor position");
  }
  Measurement z = ideal_measurement(sensor, target);
  std::normal_distribution<double> unit{0.0, 1.0};
  z.bearing = wrap_angle(z.bearing + model.sigma_bearing * unit(rng));
  z.range += model.sigma_range * unit(rng);
  return z;
}

/// Uniform Poisson clutter over the measurement region.
template <class Rng>
[[nodiscard]] std::vector<Measurement> sample_clutter(const MeasurementModel& model, Rng& rng) {
  const double mean = model.clutter_rate * model.region.area();
  if (!(mean > 0.0)) return {};
  std::poisson_distribution<int> count_dist{mean};
  const int count = count_dist(rng);
  std::uniform_real_distribution<double> bearing{model.region.bearing_min, model.region.bearing_max};
  std::uniform_real_distribution<double> range{model.region.range_min, model.region.range_max};
  std::vector<Measurement> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double b = bearing(rng);
    out.push_back(Measurement{b, range(rng)});
  }
  return out;
}

/// Clutter intensity kappa(z): lambda_c on the region, 0 elsewhere.
[[nodiscard]] inline double clutter_intensity(const Measurement& z,
                                              const MeasurementModel& model) noexcept {
  return model.region.contains(z) ? model.clutter_rate : 0.0;
}

/// Gaussian likelihood g(z | x) in (bearing, range) with the bearing residual wrapped.
/// Likelihood of z given the target's noise-free measurement h.
[[nodiscard]] inline double likelihood(const Measurement& z, const Measurement& h,
                                       const MeasurementModel& model) noexcept {
  const double dr = (z.range - h.range) / model.sigma_range;
  // exp underflows to exactly zero well before this point.
  constexpr double kUnderflow = 1500.0;
  if (dr * dr > kUnderflow) return 0.0;
  const double db = wrap_angle(z.bearing - h.bearing) / model.sigma_bearing;
  const double q = db * db + dr * dr;
  if (q > kUnderflow) return 0.0;
  const double norm = 1.0 / (2.0 * std::numbers::pi * model.sigma_bearing * model.sigma_range);
  return norm * std::exp(-0.5 * q);
}

[[nodiscard]] inline double likelihood(const Measurement& z, const SensorState& sensor,
                                       const SingleTargetState& x,
                                       const MeasurementModel& model) noexcept {
  return likelihood(z, ideal_measurement(sensor, x), model);
}

// ---------------------------------------------------------------------------
// Birth and ground truth
// ---------------------------------------------------------------------------

struct BirthComponent {
  double r{0.0};
  ParticleDensity density{};
  std::int64_t label_index{0};
};

/// Labeled multi-Bernoulli birth model; component i is born with label (k, label_index).
struct BirthModel {
  std::vector<BirthComponent> components;
};

/// Diagonal-Gaussian birth term before sampling.
struct GaussianBirthSpec {
  double r{0.0};
  SingleTargetState mean{};
  SingleTargetState stddev{};
};

template <class Rng>
[[nodiscard]] ParticleDensity sample_gaussian_density(const SingleTargetState& mean,
                                                      const SingleTargetState& stddev,
                                                      std::size_t n, Rng& rng) {
  std::normal_distribution<double> unit{0.0, 1.0};
  std::vector<Particle> particles;
  particles.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    SingleTargetState s{};
    s.x = mean.x + stddev.x * unit(rng);
    s.y = mean.y + stddev.y * unit(rng);
    s.vx = mean.vx + stddev.vx * unit(rng);
    s.vy = mean.vy + stddev.vy * unit(rng);
    s.omega = mean.omega + stddev.omega * unit(rng);
    particles.push_back(Particle{w, s});
  }
  return ParticleDensity{std::move(particles)};
}

template <class Rng>
[[nodiscard]] BirthModel make_birth_model(const std::vector<GaussianBirthSpec>& specs,
                                          std::size_t particles_per_component, Rng& rng) {
  BirthModel birth;
  std::int64_t index = 0;
  for (const auto& spec : specs) {
    if (!(spec.r >= 0.0 && spec.r <= 1.0)) throw Error("birth existence outside [0, 1]");
    birth.components.push_back(BirthComponent{
        spec.r, sample_gaussian_density(spec.mean, spec.stddev, particles_per_component, rng),
        index++});
  }
  return birth;
}

/// A simulated object with its lifetime [birth_scan, death_scan).
struct TruthTarget {
  SingleTargetState initial{};
  int birth_scan{1};
  int death_scan{51};
};

struct TruthObject {
  int track_id{0};
  SingleTargetState state{};
};

struct GroundTruth {
  /// scans[k - 1] holds the objects alive on scan k.
  std::vector<std::vector<TruthObject>> scans;
  std::vector<TruthTarget> tracks;

  [[nodiscard]] const std::vector<TruthObject>& at(int k) const {
    return scans.at(static_cast<std::size_t>(k - 1));
  }
};

/// The five objects of the reference scenario, alive on scans 1..50.
[[nodiscard]] inline std::vector<TruthTarget> default_truth_targets() {
  return {
      {{800.0, 600.0, 1.0, 0.0, 0.0}, 1, 51},  {{650.0, 500.0, 0.3, 0.6, 0.0}, 1, 51},
      {{620.0, 700.0, 0.25, 0.45, 0.0}, 1, 51}, {{750.0, 800.0, 0.0, 0.6, 0.0}, 1, 51},
      {{700.0, 700.0, 0.2, 0.6, 0.0}, 1, 51},
  };
}

/// Deterministic ground truth: each target starts at its initial state on its
/// birth scan and follows the noise-free turn model (a straight line for omega = 0).
/// With `process_noise` set the noisy model drives the truth instead.
template <class Rng>
[[nodiscard]] GroundTruth generate_ground_truth(const std::vector<TruthTarget>& targets,
                                                int n_scans, const MotionModel& motion,
                                                bool process_noise, Rng& rng) {
  GroundTruth truth;
  truth.tracks = targets;
  truth.scans.resize(static_cast<std::size_t>(std::max(n_scans, 0)));
  for (std::size_t id = 0; id < targets.size(); ++id) {
    const auto& target = targets[id];
    SingleTargetState state = target.initial;
    for (int k = target.birth_scan; k < target.death_scan && k <= n_scans; ++k) {
      if (k > target.birth_scan) {
        state = process_noise ? propagate(state, motion, rng) : ct_step(state, motion.period);
      }
      if (k >= 1) {
        truth.scans[static_cast<std::size_t>(k - 1)].push_back(
            TruthObject{static_cast<int>(id) + 1, state});
      }
    }
  }
  return truth;
}

}  // namespace peecs

#endif  // PEECS_MODELS_HPP_
