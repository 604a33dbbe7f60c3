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

#ifndef PEECS_RFS_TYPES_HPP_
#define PEECS_RFS_TYPES_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace peecs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A particle density has no positive mass left to normalize.
class DegenerateDensityError : public Error {
 public:
  using Error::Error;
};

/// A label subset refers to a label that is not part of the density.
class InvalidSubsetError : public Error {
 public:
  using Error::Error;
};

/// Two components of one labeled density carry the same label.
class DistinctLabelError : public Error {
 public:
  using Error::Error;
};

/// Existence probabilities are clamped to [kExistenceEpsilon, 1 - kExistenceEpsilon]
/// wherever a formula divides by (1 - r).
inline constexpr double kExistenceEpsilon = 1e-9;

[[nodiscard]] inline double clamp_existence(double r) noexcept {
  return std::clamp(r, kExistenceEpsilon, 1.0 - kExistenceEpsilon);
}

/// Track label: the scan a component was born on plus an index that
/// separates simultaneous births. Ordered lexicographically.
struct Label {
  std::int64_t birth_time{0};
  std::int64_t birth_index{0};

  friend constexpr auto operator<=>(const Label&, const Label&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Label& label) {
  return os << '(' << label.birth_time << ',' << label.birth_index << ')';
}

/// Single-object state of the nearly-constant-turn model.
struct SingleTargetState {
  double x{0.0};      ///< m
  double y{0.0};      ///< m
  double vx{0.0};     ///< m/s
  double vy{0.0};     ///< m/s
  double omega{0.0};  ///< rad/s

  friend constexpr bool operator==(const SingleTargetState&, const SingleTargetState&) = default;

  [[nodiscard]] bool is_finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(vx) && std::isfinite(vy) &&
           std::isfinite(omega);
  }
};

struct Particle {
  double weight{0.0};
  SingleTargetState state{};

  friend constexpr bool operator==(const Particle&, const Particle&) = default;
};

/// Weighted particle approximation of a single-object density.
///
/// Construction does not normalize; call normalize() when weights are raw.
class ParticleDensity {
 public:
  ParticleDensity() = default;
  explicit ParticleDensity(std::vector<Particle> particles) : particles_(std::move(particles)) {}

  /// Single particle of unit weight.
  [[nodiscard]] static ParticleDensity point_mass(const SingleTargetState& state) {
    return ParticleDensity{{Particle{1.0, state}}};
  }

  [[nodiscard]] std::span<const Particle> particles() const noexcept { return particles_; }
  [[nodiscard]] std::size_t size() const noexcept { return particles_.size(); }
  [[nodiscard]] bool empty() const noexcept { return particles_.empty(); }
  [[nodiscard]] const Particle& operator[](std::size_t i) const { return particles_[i]; }

  [[nodiscard]] double total_weight() const noexcept {
    double total = 0.0;
    for (const auto& p : particles_) total += p.weight;
    return total;
  }

  friend bool operator==(const ParticleDensity&, const ParticleDensity&) = default;

 private:
  std::vector<Particle> particles_;
};

/// Rescales weights to sum to one, preserving their proportions.
[[nodiscard]] inline ParticleDensity normalize(const ParticleDensity& density) {
  const auto particles = density.particles();
  double total = 0.0;
  for (const auto& p : particles) {
    if (p.weight < 0.0 || !std::isfinite(p.weight)) {
      throw DegenerateDensityError("particle weight is negative or not finite");
    }
    total += p.weight;
  }
  if (particles.empty() || !(total > 0.0)) {
    throw DegenerateDensityError("particle density has no positive mass");
  }
  std::vector<Particle> out(particles.begin(), particles.end());
  for (auto& p : out) p.weight /= total;
  return ParticleDensity{std::move(out)};
}

/// Weighted mean of the particle states, component-wise.
[[nodiscard]] inline SingleTargetState eap_estimate(const ParticleDensity& density) {
  const double total = density.total_weight();
  if (density.empty() || !(total > 0.0)) {
    throw DegenerateDensityError("cannot estimate from a density with no mass");
  }
  SingleTargetState mean{};
  for (const auto& p : density.particles()) {
    const double w = p.weight / total;
    mean.x += w * p.state.x;
    mean.y += w * p.state.y;
    mean.vx += w * p.state.vx;
    mean.vy += w * p.state.vy;
    mean.omega += w * p.state.omega;
  }
  return mean;
}

/// One labeled Bernoulli track.
struct LmbComponent {
  Label label{};
  double r{0.0};
  ParticleDensity density{};
};

/// One unlabeled Bernoulli component.
struct BernoulliComponent {
  double r{0.0};
  ParticleDensity density{};
};

/// Labeled multi-Bernoulli density. Components are kept sorted by label.
class LmbDensity {
 public:
  LmbDensity() = default;

  explicit LmbDensity(std::vector<LmbComponent> components) : components_(std::move(components)) {
    std::sort(components_.begin(), components_.end(),
              [](const LmbComponent& a, const LmbComponent& b) { return a.label < b.label; });
    for (std::size_t i = 1; i < components_.size(); ++i) {
      if (components_[i - 1].label == components_[i].label) {
        throw DistinctLabelError("duplicate label in LMB density");
      }
    }
    for (const auto& c : components_) {
      if (!(c.r >= 0.0 && c.r <= 1.0)) throw Error("existence probability outside [0, 1]");
    }
  }

  [[nodiscard]] std::span<const LmbComponent> components() const noexcept { return components_; }
  [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
  [[nodiscard]] bool empty() const noexcept { return components_.empty(); }
  [[nodiscard]] const LmbComponent& operator[](std::size_t i) const { return components_[i]; }

  [[nodiscard]] std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.label);
    return out;
  }

  /// Index of `label`, or size() when absent.
  [[nodiscard]] std::size_t find(const Label& label) const noexcept {
    const auto it = std::lower_bound(
        components_.begin(), components_.end(), label,
        [](const LmbComponent& c, const Label& l) { return c.label < l; });
    if (it == components_.end() || it->label != label) return components_.size();
    return static_cast<std::size_t>(it - components_.begin());
  }

  [[nodiscard]] double expected_cardinality() const noexcept {
    double n = 0.0;
    for (const auto& c : components_) n += c.r;
    return n;
  }

 private:
  std::vector<LmbComponent> components_;
};

/// Unlabeled multi-Bernoulli density.
struct MbDensity {
  std::vector<BernoulliComponent> components;

  [[nodiscard]] double expected_cardinality() const noexcept {
    double n = 0.0;
    for (const auto& c : components) n += c.r;
    return n;
  }
};

/// Probability that the labeled set equals exactly `subset`:
/// prod_{i not in L}(1 - r_i) * prod_{l in L} r_l, with r clamped away from 0 and 1.
[[nodiscard]] inline double lmb_subset_weight(std::span<const LmbComponent> components,
                                              std::span<const Label> subset) {
  for (const auto& label : subset) {
    const bool known = std::any_of(components.begin(), components.end(),
                                   [&](const LmbComponent& c) { return c.label == label; });
    if (!known) throw InvalidSubsetError("subset contains a label not present in the density");
  }
  double weight = 1.0;
  for (const auto& c : components) {
    const double r = clamp_existence(c.r);
    const bool included = std::find(subset.begin(), subset.end(), c.label) != subset.end();
    weight *= included ? r : 1.0 - r;
  }
  return weight;
}

[[nodiscard]] inline double lmb_subset_weight(const LmbDensity& density,
                                              std::span<const Label> subset) {
  return lmb_subset_weight(density.components(), subset);
}

}  // namespace peecs

#endif  // PEECS_RFS_TYPES_HPP_
