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

#ifndef PEECS_HARNESS_HPP_
#define PEECS_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "peecs/cbmember.hpp"
#include "peecs/config.hpp"
#include "peecs/lmb_filter.hpp"
#include "peecs/metrics.hpp"
#include "peecs/models.hpp"
#include "peecs/sensor_control.hpp"

namespace peecs {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial `index` in a Monte-Carlo batch.
[[nodiscard]] constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return mix_seed(mix_seed(base_seed) ^ (index + 1));
}

/// Independent random streams of one trial, one per purpose, so two filter
/// modes run on the same trial see identical truth, detection, noise and clutter draws.
struct TrialStreams {
  enum Purpose : std::uint64_t { kTruth = 1, kDetection, kNoise, kClutter, kShuffle, kFilter };

  explicit TrialStreams(std::uint64_t seed)
      : truth(mix_seed(seed ^ (kTruth << 56))),
        detection(mix_seed(seed ^ (kDetection << 56))),
        noise(mix_seed(seed ^ (kNoise << 56))),
        clutter(mix_seed(seed ^ (kClutter << 56))),
        shuffle(mix_seed(seed ^ (kShuffle << 56))),
        filter(mix_seed(seed ^ (kFilter << 56))) {}

  Rng truth;
  Rng detection;
  Rng noise;
  Rng clutter;
  Rng shuffle;
  Rng filter;
};

struct ScanRecord {
  int k{0};
  SensorState sensor{};  ///< position after this scan's move
  SensorCommand command{};
  std::vector<TruthObject> truth;
  std::vector<Track> tracks;
  OspaResult ospa{};
  std::vector<CommandCost> costs;
  std::size_t n_measurements{0};

  [[nodiscard]] int n_true() const noexcept { return static_cast<int>(truth.size()); }
  [[nodiscard]] int n_est() const noexcept { return static_cast<int>(tracks.size()); }
};

struct TrialRecord {
  std::uint64_t seed{0};
  FilterMode mode{FilterMode::kLmbPeecs};
  SensorState sensor_start{};
  std::vector<ScanRecord> scans;
};

/// Distance from the sensor to the centroid of the live objects; NaN when none are alive.
[[nodiscard]] inline double centroid_distance(const ScanRecord& scan) noexcept {
  if (scan.truth.empty()) return std::numeric_limits<double>::quiet_NaN();
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& t : scan.truth) {
    cx += t.state.x;
    cy += t.state.y;
  }
  cx /= static_cast<double>(scan.truth.size());
  cy /= static_cast<double>(scan.truth.size());
  return std::hypot(scan.sensor.x - cx, scan.sensor.y - cy);
}

namespace detail {

// One scan of measurements: each live object is detected with p_D and, if so,
// produces one noisy measurement; clutter is appended and the set shuffled.
// Every object consumes the same draws whether or not it is detected.
inline std::vector<Measurement> simulate_measurements(const std::vector<TruthObject>& objects,
                                                      const SensorState& sensor,
                                                      const MeasurementModel& meas,
                                                      TrialStreams& streams) {
  std::vector<Measurement> z;
  std::uniform_real_distribution<double> uniform{0.0, 1.0};
  std::normal_distribution<double> unit{0.0, 1.0};
  for (const auto& obj : objects) {
    const double u = uniform(streams.detection);
    const double nb = unit(streams.noise);
    const double nr = unit(streams.noise);
    if (!(u < detection_prob(sensor, obj.state, meas))) continue;
    Measurement m = ideal_measurement(sensor, obj.state);
    m.bearing = wrap_angle(m.bearing + meas.sigma_bearing * nb);
    m.range += meas.sigma_range * nr;
    // The sensor only reports returns inside its measurement region.
    if (meas.region.contains(m)) z.push_back(m);
  }
  auto clutter = sample_clutter(meas, streams.clutter);
  z.insert(z.end(), clutter.begin(), clutter.end());
  std::shuffle(z.begin(), z.end(), streams.shuffle);
  return z;
}

// Main-filter update of the comparison mode: the multi-Bernoulli update with
// legacy components keeping their labels and measurement-updated components
// labelled (k, kUpdatedLabelOffset + j).
inline constexpr std::int64_t kUpdatedLabelOffset = 1'000'000;

inline LmbDensity cbmember_filter_update(const LmbDensity& pred, std::span<const Measurement> z,
                                         const SensorState& sensor, const RunConfig& cfg,
                                         std::int64_t k, Rng& rng) {
  const MbDensity post =
      cbmember_update(strip_labels(pred), z, sensor, cfg.measurement, {cfg.truncation.prune_r});
  std::vector<LmbComponent> comps;
  comps.reserve(post.components.size());
  for (std::size_t i = 0; i < post.components.size(); ++i) {
    const Label label = i < pred.size()
                            ? pred[i].label
                            : Label{k, kUpdatedLabelOffset + static_cast<std::int64_t>(i - pred.size())};
    comps.push_back(LmbComponent{label, post.components[i].r, post.components[i].density});
  }
  std::vector<LmbComponent> kept;
  for (auto& c : comps) {
    if (c.r >= cfg.truncation.prune_r) kept.push_back(std::move(c));
  }
  if (kept.size() > cfg.cbmember_max_components) {
    std::stable_sort(kept.begin(), kept.end(),
                     [](const LmbComponent& a, const LmbComponent& b) { return a.r > b.r; });
    kept.resize(cfg.cbmember_max_components);
  }
  for (auto& c : kept) c.density = resample(c.density, cfg.truncation.max_particles, rng);
  return LmbDensity{std::move(kept)};
}

inline std::vector<Position> positions(const std::vector<TruthObject>& objects) {
  std::vector<Position> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back({o.state.x, o.state.y});
  return out;
}

inline std::vector<Position> positions(const std::vector<Track>& tracks) {
  std::vector<Position> out;
  out.reserve(tracks.size());
  for (const auto& t : tracks) out.push_back({t.state.x, t.state.y});
  return out;
}

}  // namespace detail

/// One closed-loop run: predict, choose a command from ideal measurements,
/// move, measure, update, for every scan. Deterministic in (cfg, seed).
[[nodiscard]] inline TrialRecord run_trial(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  TrialStreams streams(seed);
  const GroundTruth truth = generate_ground_truth(cfg.targets, cfg.n_scans, cfg.motion,
                                                  cfg.truth_process_noise, streams.truth);
  const BirthModel birth = make_birth_model(cfg.birth, cfg.birth_particles, streams.filter);

  TrialRecord record;
  record.seed = seed;
  record.mode = cfg.mode;
  record.sensor_start = cfg.sensor_start;
  record.scans.reserve(static_cast<std::size_t>(cfg.n_scans));

  LmbDensity posterior;
  SensorState sensor = cfg.sensor_start;
  for (int k = 1; k <= cfg.n_scans; ++k) {
    const LmbDensity pred = predict(posterior, birth, cfg.motion, k, streams.filter);

    CommandSelection sel = select_command(pred, sensor, cfg.control, cfg.measurement);
    sensor = apply(sensor, sel.command);

    const auto& objects = truth.at(k);
    const std::vector<Measurement> z =
        detail::simulate_measurements(objects, sensor, cfg.measurement, streams);

    if (cfg.mode == FilterMode::kLmbPeecs) {
      posterior = update(pred, z, sensor, cfg.measurement, cfg.truncation, streams.filter);
    } else {
      posterior = detail::cbmember_filter_update(pred, z, sensor, cfg, k, streams.filter);
    }

    ScanRecord scan;
    scan.k = k;
    scan.sensor = sensor;
    scan.command = sel.command;
    scan.truth = objects;
    scan.tracks = extract_tracks(posterior, cfg.extract_threshold);
    scan.ospa = ospa(detail::positions(scan.truth), detail::positions(scan.tracks), cfg.ospa);
    scan.costs = std::move(sel.table);
    scan.n_measurements = z.size();
    record.scans.push_back(std::move(scan));
  }
  return record;
}

/// Runs `n_trials` independent trials on `workers` threads. Results are in
/// trial order regardless of scheduling.
[[nodiscard]] inline std::vector<TrialRecord> run_trials(const RunConfig& cfg, int n_trials,
                                                         std::uint64_t base_seed, int workers) {
  if (n_trials < 1) throw ConfigError("n_trials must be at least 1");
  std::vector<TrialRecord> records(static_cast<std::size_t>(n_trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int t = next++; t < n_trials; t = next++) {
      try {
        records[static_cast<std::size_t>(t)] =
            run_trial(cfg, trial_seed(base_seed, static_cast<std::uint64_t>(t)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(workers, 1, n_trials);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

struct Summary {
  double mean{0.0};
  double stddev{0.0};
};

/// Mean and population standard deviation. Values are sorted first so the
/// result does not depend on input order.
[[nodiscard]] inline Summary summarize(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

struct ScanAggregate {
  int k{0};
  Summary ospa_total;
  Summary ospa_loc;
  Summary ospa_card;
  Summary card_error;  ///< n_est - n_true
  Summary centroid_distance;
};

/// Per-scan statistics across trials.
[[nodiscard]] inline std::vector<ScanAggregate> aggregate(const std::vector<TrialRecord>& records) {
  if (records.empty()) return {};
  const std::size_t n_scans = records.front().scans.size();
  std::vector<ScanAggregate> out(n_scans);
  for (std::size_t s = 0; s < n_scans; ++s) {
    std::vector<double> total, loc, card, err, dist;
    for (const auto& rec : records) {
      if (rec.scans.size() != n_scans) throw Error("aggregate: trials differ in length");
      const auto& scan = rec.scans[s];
      total.push_back(scan.ospa.total);
      loc.push_back(scan.ospa.localization);
      card.push_back(scan.ospa.cardinality);
      err.push_back(static_cast<double>(scan.n_est() - scan.n_true()));
      dist.push_back(centroid_distance(scan));
    }
    out[s].k = records.front().scans[s].k;
    out[s].ospa_total = summarize(std::move(total));
    out[s].ospa_loc = summarize(std::move(loc));
    out[s].ospa_card = summarize(std::move(card));
    out[s].card_error = summarize(std::move(err));
    out[s].centroid_distance = summarize(std::move(dist));
  }
  return out;
}

/// Aggregated Monte-Carlo statistics together with the trials they came from.
struct MonteCarloResult {
  std::vector<TrialRecord> trials;
  std::vector<ScanAggregate> per_scan;
};

[[nodiscard]] inline MonteCarloResult run_monte_carlo(const RunConfig& cfg, int n_trials,
                                                      std::uint64_t base_seed) {
  MonteCarloResult result;
  result.trials = run_trials(cfg, n_trials, base_seed, cfg.workers);
  result.per_scan = aggregate(result.trials);
  return result;
}

/// Mean of a per-scan statistic over scans [first, last] (1-based, inclusive).
template <class Get>
[[nodiscard]] double window_mean(const std::vector<ScanAggregate>& per_scan, int first, int last,
                                 Get get) {
  double sum = 0.0;
  int count = 0;
  for (const auto& s : per_scan) {
    if (s.k < first || s.k > last) continue;
    sum += get(s);
    ++count;
  }
  return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace peecs

#endif  // PEECS_HARNESS_HPP_
