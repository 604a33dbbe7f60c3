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

#ifndef PEECS_CONFIG_HPP_
#define PEECS_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "peecs/lmb_filter.hpp"
#include "peecs/metrics.hpp"
#include "peecs/models.hpp"
#include "peecs/sensor_control.hpp"

namespace peecs {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class FilterMode { kLmbPeecs, kCbMemberPeecs };

[[nodiscard]] inline std::string_view to_string(FilterMode mode) noexcept {
  return mode == FilterMode::kLmbPeecs ? "lmb-peecs" : "cbmember-peecs";
}

[[nodiscard]] inline FilterMode parse_filter_mode(std::string_view text) {
  if (text == "lmb-peecs") return FilterMode::kLmbPeecs;
  if (text == "cbmember-peecs") return FilterMode::kCbMemberPeecs;
  throw ConfigError("unknown filter mode '" + std::string(text) +
                    "' (expected lmb-peecs or cbmember-peecs)");
}

/// Birth terms centred on the first four listed object positions, with the
/// reference existence probabilities and spread.
[[nodiscard]] inline std::vector<GaussianBirthSpec> default_birth_specs() {
  const SingleTargetState spread{50.0, 50.0, 50.0, 50.0, 6.0 * std::numbers::pi / 180.0};
  return {
      {0.02, {800.0, 600.0, 0.0, 0.0, 0.0}, spread},
      {0.02, {650.0, 500.0, 0.0, 0.0, 0.0}, spread},
      {0.03, {620.0, 700.0, 0.0, 0.0, 0.0}, spread},
      {0.03, {750.0, 800.0, 0.0, 0.0, 0.0}, spread},
  };
}

/// Everything a simulation run needs. Defaults reproduce the reference scenario.
struct RunConfig {
  MotionModel motion{};
  MeasurementModel measurement{};
  std::vector<GaussianBirthSpec> birth{default_birth_specs()};
  std::size_t birth_particles{1000};
  std::vector<TruthTarget> targets{default_truth_targets()};
  bool truth_process_noise{false};
  SensorState sensor_start{0.0, 1500.0};

  TruncationConfig truncation{};
  double extract_threshold{0.5};
  std::size_t cbmember_max_components{100};
  ControlConfig control{};
  OspaParams ospa{};

  int n_scans{50};
  int n_trials{20};
  std::uint64_t seed{1};
  FilterMode mode{FilterMode::kLmbPeecs};
  std::string output_dir{"out"};
  int workers{1};
  bool plot{false};

  void validate() const {
    motion.validate();
    measurement.validate();
    truncation.validate();
    control.validate();
    ospa.validate();
    if (n_scans < 1) throw ConfigError("n_scans must be at least 1");
    if (n_trials < 1) throw ConfigError("n_trials must be at least 1");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (birth_particles == 0) throw ConfigError("birth particles must be positive");
    if (cbmember_max_components == 0) throw ConfigError("cbmember_max_components must be positive");
    if (!(extract_threshold >= 0.0 && extract_threshold <= 1.0)) {
      throw ConfigError("extract_threshold outside [0, 1]");
    }
    for (const auto& b : birth) {
      if (!(b.r >= 0.0 && b.r <= 1.0)) throw ConfigError("birth r outside [0, 1]");
    }
    for (const auto& t : targets) {
      if (t.death_scan < t.birth_scan) throw ConfigError("target dies before it is born");
      if (!t.initial.is_finite()) throw ConfigError("target initial state not finite");
    }
  }
};

namespace detail {

using Json = nlohmann::json;

inline void check_keys(const Json& obj, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const Json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

inline SingleTargetState read_state(const Json& value, std::string_view where) {
  if (!value.is_array() || value.size() < 4 || value.size() > 5) {
    throw ConfigError(std::string(where) + ": expected [x, y, vx, vy] or [x, y, vx, vy, omega]");
  }
  const auto v = value.get<std::vector<double>>();
  return SingleTargetState{v[0], v[1], v[2], v[3], v.size() == 5 ? v[4] : 0.0};
}

}  // namespace detail

/// Parses a JSON run configuration. Absent keys keep their defaults; unknown keys are errors.
[[nodiscard]] inline RunConfig parse_config(const nlohmann::json& root) {
  using detail::check_keys;
  using detail::read;
  RunConfig cfg;
  check_keys(root, "config",
             {"n_scans", "n_trials", "seed", "mode", "output_dir", "workers", "plot", "motion",
              "measurement", "birth", "truth", "sensor", "filter", "control", "ospa"});
  read(root, "n_scans", cfg.n_scans, "config");
  read(root, "n_trials", cfg.n_trials, "config");
  read(root, "seed", cfg.seed, "config");
  read(root, "output_dir", cfg.output_dir, "config");
  read(root, "workers", cfg.workers, "config");
  read(root, "plot", cfg.plot, "config");
  if (root.contains("mode")) cfg.mode = parse_filter_mode(root.at("mode").get<std::string>());

  if (root.contains("motion")) {
    const auto& j = root.at("motion");
    check_keys(j, "motion", {"period", "sigma_accel", "sigma_turn", "survival_prob"});
    read(j, "period", cfg.motion.period, "motion");
    read(j, "sigma_accel", cfg.motion.sigma_accel, "motion");
    read(j, "sigma_turn", cfg.motion.sigma_turn, "motion");
    read(j, "survival_prob", cfg.motion.survival_prob, "motion");
  }
  if (root.contains("measurement")) {
    const auto& j = root.at("measurement");
    check_keys(j, "measurement",
               {"sigma_bearing", "sigma_range", "full_detection_radius", "detection_slope",
                "clutter_rate", "region"});
    read(j, "sigma_bearing", cfg.measurement.sigma_bearing, "measurement");
    read(j, "sigma_range", cfg.measurement.sigma_range, "measurement");
    read(j, "full_detection_radius", cfg.measurement.full_detection_radius, "measurement");
    read(j, "detection_slope", cfg.measurement.detection_slope, "measurement");
    read(j, "clutter_rate", cfg.measurement.clutter_rate, "measurement");
    if (j.contains("region")) {
      const auto& reg = j.at("region");
      check_keys(reg, "measurement.region", {"bearing_min", "bearing_max", "range_min", "range_max"});
      auto& region = cfg.measurement.region;
      read(reg, "bearing_min", region.bearing_min, "measurement.region");
      read(reg, "bearing_max", region.bearing_max, "measurement.region");
      read(reg, "range_min", region.range_min, "measurement.region");
      read(reg, "range_max", region.range_max, "measurement.region");
    }
  }
  if (root.contains("birth")) {
    const auto& j = root.at("birth");
    check_keys(j, "birth", {"particles", "components"});
    read(j, "particles", cfg.birth_particles, "birth");
    if (j.contains("components")) {
      cfg.birth.clear();
      for (const auto& c : j.at("components")) {
        check_keys(c, "birth.components[]", {"r", "mean", "stddev"});
        GaussianBirthSpec spec;
        spec.stddev = default_birth_specs().front().stddev;
        read(c, "r", spec.r, "birth.components[]");
        if (!c.contains("mean")) throw ConfigError("birth.components[]: missing mean");
        spec.mean = detail::read_state(c.at("mean"), "birth.components[].mean");
        if (c.contains("stddev")) spec.stddev = detail::read_state(c.at("stddev"), "birth.components[].stddev");
        cfg.birth.push_back(spec);
      }
    }
  }
  if (root.contains("truth")) {
    const auto& j = root.at("truth");
    check_keys(j, "truth", {"process_noise", "targets"});
    read(j, "process_noise", cfg.truth_process_noise, "truth");
    if (j.contains("targets")) {
      cfg.targets.clear();
      for (const auto& t : j.at("targets")) {
        check_keys(t, "truth.targets[]", {"initial", "birth_scan", "death_scan"});
        TruthTarget target;
        if (!t.contains("initial")) throw ConfigError("truth.targets[]: missing initial");
        target.initial = detail::read_state(t.at("initial"), "truth.targets[].initial");
        target.death_scan = cfg.n_scans + 1;
        read(t, "birth_scan", target.birth_scan, "truth.targets[]");
        read(t, "death_scan", target.death_scan, "truth.targets[]");
        cfg.targets.push_back(target);
      }
    }
  }
  if (root.contains("sensor")) {
    const auto& j = root.at("sensor");
    check_keys(j, "sensor", {"initial"});
    if (j.contains("initial")) {
      const auto v = j.at("initial").get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("sensor.initial: expected [x, y]");
      cfg.sensor_start = SensorState{v[0], v[1]};
    }
  }
  if (root.contains("filter")) {
    const auto& j = root.at("filter");
    check_keys(j, "filter",
               {"k_subsets", "m_assignments", "prune_r", "max_particles", "gate_sigma",
                "extract_threshold", "cbmember_max_components"});
    read(j, "k_subsets", cfg.truncation.k_subsets, "filter");
    read(j, "m_assignments", cfg.truncation.m_assignments, "filter");
    read(j, "prune_r", cfg.truncation.prune_r, "filter");
    read(j, "max_particles", cfg.truncation.max_particles, "filter");
    read(j, "gate_sigma", cfg.truncation.gate_sigma, "filter");
    read(j, "extract_threshold", cfg.extract_threshold, "filter");
    read(j, "cbmember_max_components", cfg.cbmember_max_components, "filter");
  }
  if (root.contains("control")) {
    const auto& j = root.at("control");
    check_keys(j, "control",
               {"eta", "move_radii", "n_directions", "include_stay", "estimate_threshold",
                "prune_updated_r"});
    read(j, "eta", cfg.control.eta, "control");
    read(j, "move_radii", cfg.control.move_radii, "control");
    read(j, "n_directions", cfg.control.n_directions, "control");
    read(j, "include_stay", cfg.control.include_stay, "control");
    read(j, "estimate_threshold", cfg.control.estimate_threshold, "control");
    read(j, "prune_updated_r", cfg.control.prune_updated_r, "control");
  }
  if (root.contains("ospa")) {
    const auto& j = root.at("ospa");
    check_keys(j, "ospa", {"cutoff", "order"});
    read(j, "cutoff", cfg.ospa.cutoff, "ospa");
    read(j, "order", cfg.ospa.order, "ospa");
  }
  cfg.validate();
  return cfg;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(root);
}

}  // namespace peecs

#endif  // PEECS_CONFIG_HPP_
