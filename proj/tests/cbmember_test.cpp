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

#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"
#include "peecs/cbmember.hpp"
#include "test_support.hpp"

namespace {

using peecs::BernoulliComponent;
using peecs::MbDensity;
using peecs::MeasurementModel;
using peecs::Measurement;
using peecs::Particle;
using peecs::ParticleDensity;
using peecs::SensorState;
using peecs::SingleTargetState;
using peecs::testing::Rng;

MbDensity random_mb(Rng& rng, std::size_t n, std::size_t particles) {
  MbDensity mb;
  for (std::size_t i = 0; i < n; ++i) {
    const double range = peecs::testing::uniform(rng, 150.0, 1200.0);
    const double bearing = peecs::testing::uniform(rng, -3.0, 3.0);
    double r = peecs::testing::random_r(rng);
    if (r == 1.0) r = 0.97;
    mb.components.push_back(BernoulliComponent{
        r, peecs::testing::random_density(rng, particles, range * std::sin(bearing), range * std::cos(bearing), 10)});
  }
  return mb;
}

std::vector<Measurement> random_measurements(Rng& rng, const MbDensity& mb, std::size_t m) {
  std::vector<Measurement> z;
  for (std::size_t j = 0; j < m; ++j) {
    if (!mb.components.empty() && j % 2 == 0) {
      const auto& c = mb.components[peecs::testing::uniform_index(rng, 0, mb.components.size() - 1)];
      Measurement ideal = peecs::ideal_measurement(SensorState{}, peecs::eap_estimate(c.density));
      ideal.range += peecs::testing::uniform(rng, -5, 5);
      z.push_back(ideal);
    } else {
      z.push_back({peecs::testing::uniform(rng, -3.1, 3.1), peecs::testing::uniform(rng, 10, 1990)});
    }
  }
  return z;
}

// Existence probabilities of the update, written out per term with the
// scenario-model oracle. Updated components are listed in measurement order.
struct ExpectedExistence {
  std::vector<double> legacy;
  std::vector<double> updated;
};

ExpectedExistence oracle_existence(const MbDensity& mb, const std::vector<Measurement>& z,
                                   const MeasurementModel& meas) {
  const auto s = peecs::testing::oracle_model(meas);
  ExpectedExistence out;
  std::vector<double> rho_l;
  for (const auto& c : mb.components) {
    double rho = 0.0;
    for (const auto& p : c.density.particles()) rho += p.weight * peecs::oracle::pd(s, 0, 0, p.state.x, p.state.y);
    rho_l.push_back(rho);
    out.legacy.push_back(c.r * (1 - rho) / (1 - c.r * rho));
  }
  for (const auto& m : z) {
    double num = 0.0;
    double den = peecs::oracle::kappa(s, m.bearing, m.range);
    for (std::size_t i = 0; i < mb.components.size(); ++i) {
      const double r = peecs::oracle::clamp_r(mb.components[i].r);
      double rho = 0.0;
      for (const auto& p : mb.components[i].density.particles()) {
        rho += p.weight * peecs::oracle::pd(s, 0, 0, p.state.x, p.state.y) *
               peecs::oracle::gaussian_lik(s, 0, 0, p.state.x, p.state.y, m.bearing, m.range);
      }
      num += r * (1 - r) * rho / ((1 - r * rho_l[i]) * (1 - r * rho_l[i]));
      den += r * rho / (1 - r * rho_l[i]);
    }
    out.updated.push_back(num / den);
  }
  return out;
}

TEST(StripLabels, KeepsExistenceAndDensity) {
  Rng rng{61};
  const auto lmb = peecs::testing::random_lmb(rng, 5);
  const auto mb = peecs::strip_labels(lmb);
  ASSERT_EQ(mb.components.size(), 5U);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(mb.components[i].r, lmb[i].r);
    EXPECT_EQ(mb.components[i].density, lmb[i].density);
  }
  EXPECT_TRUE(peecs::strip_labels(peecs::LmbDensity{}).components.empty());
}

TEST(CbMemberUpdate, UndetectableWithoutMeasurementsIsIdentity) {
  MbDensity mb;
  mb.components.push_back(BernoulliComponent{0.4, ParticleDensity::point_mass({0, 5000, 0, 0, 0})});
  mb.components.push_back(BernoulliComponent{0.9, ParticleDensity::point_mass({-4000, 0, 0, 0, 0})});
  const auto post = peecs::cbmember_update(mb, {}, SensorState{}, MeasurementModel{});
  ASSERT_EQ(post.components.size(), 2U);
  EXPECT_DOUBLE_EQ(post.components[0].r, 0.4);
  EXPECT_DOUBLE_EQ(post.components[1].r, 0.9);
  EXPECT_EQ(post.components[0].density, mb.components[0].density);
}

TEST(CbMemberUpdate, LegacyExistence) {
  // Target at 800 m: p_D = 1 - 0.001 * 500 = 0.5.
  MbDensity mb;
  mb.components.push_back(BernoulliComponent{0.6, ParticleDensity::point_mass({0, 800, 0, 0, 0})});
  const auto post = peecs::cbmember_update(mb, {}, SensorState{}, MeasurementModel{});
  ASSERT_EQ(post.components.size(), 1U);
  EXPECT_NEAR(post.components[0].r, 0.6 * 0.5 / (1 - 0.6 * 0.5), 1e-12);
}

TEST(CbMemberUpdate, CertainDetectionWithoutMeasurementRemovesTrack) {
  MbDensity mb;
  mb.components.push_back(BernoulliComponent{1.0, ParticleDensity::point_mass({0, 100, 0, 0, 0})});
  const auto post = peecs::cbmember_update(mb, {}, SensorState{}, MeasurementModel{});
  ASSERT_EQ(post.components.size(), 1U);
  EXPECT_EQ(post.components[0].r, 0.0);
}

TEST(CbMemberUpdate, FarClutterIsPruned) {
  MbDensity mb;
  mb.components.push_back(BernoulliComponent{0.5, ParticleDensity::point_mass({0, 200, 0, 0, 0})});
  const std::vector<Measurement> z{{3.0, 1900.0}};
  const auto post = peecs::cbmember_update(mb, z, SensorState{}, MeasurementModel{});
  EXPECT_EQ(post.components.size(), 1U);
}

TEST(CbMemberUpdate, MeasurementOnTargetCreatesConfidentComponent) {
  MeasurementModel meas;
  const SingleTargetState x{0, 200, 0, 0, 0};
  MbDensity mb;
  mb.components.push_back(BernoulliComponent{0.5, ParticleDensity::point_mass(x)});
  const std::vector<Measurement> z{peecs::ideal_measurement(SensorState{}, x)};
  const auto post = peecs::cbmember_update(mb, z, SensorState{}, meas);
  ASSERT_EQ(post.components.size(), 2U);
  EXPECT_EQ(post.components[0].r, 0.0);
  const double g = 1.0 / (2 * std::numbers::pi * meas.sigma_bearing * meas.sigma_range);
  // rho_L = 1: numerator r(1 - r) g / (1 - r)^2 = r g / (1 - r), denominator kappa + r g / (1 - r).
  const double a = 0.5 * g / 0.5;
  EXPECT_NEAR(post.components[1].r, a / (meas.clutter_rate + a), 1e-12);
  EXPECT_EQ(post.components[1].density[0].state, x);
}

TEST(CbMemberUpdate, ExistenceMatchesFormulaOracle) {
  Rng rng{62};
  const MeasurementModel meas;
  for (int trial = 0; trial < 50; ++trial) {
    const auto mb = random_mb(rng, peecs::testing::uniform_index(rng, 0, 5), 4);
    const auto z = random_measurements(rng, mb, peecs::testing::uniform_index(rng, 0, 5));
    peecs::CbMemberOptions options;
    options.prune_updated_r = 0.0;
    const auto post = peecs::cbmember_update(mb, z, SensorState{}, meas, options);
    const auto expected = oracle_existence(mb, z, meas);
    ASSERT_GE(post.components.size(), mb.components.size());
    for (std::size_t i = 0; i < mb.components.size(); ++i) {
      EXPECT_NEAR(post.components[i].r, expected.legacy[i], 1e-12);
    }
    // Updated components with no support are skipped; match the rest by value.
    std::vector<double> nonzero;
    for (const double r : expected.updated) {
      if (r > 0.0) nonzero.push_back(r);
    }
    ASSERT_EQ(post.components.size() - mb.components.size(), nonzero.size());
    for (std::size_t k = 0; k < nonzero.size(); ++k) {
      EXPECT_NEAR(post.components[mb.components.size() + k].r, nonzero[k], 1e-12);
    }
  }
}

TEST(CbMemberUpdate, ExistenceStaysInUnitIntervalProperty) {
  Rng rng{63};
  const MeasurementModel meas;
  for (int trial = 0; trial < 100; ++trial) {
    const auto mb = random_mb(rng, peecs::testing::uniform_index(rng, 0, 6), 5);
    const auto z = random_measurements(rng, mb, peecs::testing::uniform_index(rng, 0, 8));
    const auto post = peecs::cbmember_update(mb, z, SensorState{}, meas);
    for (const auto& c : post.components) {
      EXPECT_GE(c.r, 0.0);
      EXPECT_LE(c.r, 1.0);
      EXPECT_NEAR(c.density.total_weight(), 1.0, 1e-9);
    }
  }
}

TEST(CbMemberUpdate, NearMeasurementRaisesExpectedCardinality) {
  Rng rng{64};
  const MeasurementModel meas;
  for (int trial = 0; trial < 50; ++trial) {
    const auto mb = random_mb(rng, peecs::testing::uniform_index(rng, 1, 4), 4);
    auto z = random_measurements(rng, mb, peecs::testing::uniform_index(rng, 0, 3));
    const double before = peecs::cbmember_update(mb, z, SensorState{}, meas).expected_cardinality();
    z.push_back(peecs::ideal_measurement(SensorState{}, peecs::eap_estimate(mb.components[0].density)));
    const double after = peecs::cbmember_update(mb, z, SensorState{}, meas).expected_cardinality();
    EXPECT_GE(after, before);
  }
}

}  // namespace
