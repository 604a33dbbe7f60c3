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

#include <array>
#include <vector>

#include "oracles.hpp"
#include "peecs/metrics.hpp"
#include "test_support.hpp"

namespace {

using peecs::OspaParams;
using peecs::Position;
using peecs::testing::Rng;

std::vector<Position> random_set(Rng& rng, std::size_t n) {
  std::vector<Position> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({peecs::testing::uniform(rng, -150, 150), peecs::testing::uniform(rng, -150, 150)});
  }
  return out;
}

std::vector<std::array<double, 2>> pairs(const std::vector<Position>& v) {
  std::vector<std::array<double, 2>> out;
  for (const auto& p : v) out.push_back({p.x, p.y});
  return out;
}

TEST(Ospa, BothEmptyIsZero) {
  const auto d = peecs::ospa({}, {}, OspaParams{});
  EXPECT_EQ(d.total, 0.0);
  EXPECT_EQ(d.localization, 0.0);
  EXPECT_EQ(d.cardinality, 0.0);
}

TEST(Ospa, OneEmptyIsCutoff) {
  const std::vector<Position> x{{1, 2}, {3, 4}};
  const auto d = peecs::ospa(x, {}, OspaParams{});
  EXPECT_DOUBLE_EQ(d.total, 100.0);
  EXPECT_DOUBLE_EQ(d.cardinality, 100.0);
  EXPECT_DOUBLE_EQ(d.localization, 0.0);
}

TEST(Ospa, SinglePairDistance) {
  const std::vector<Position> x{{0, 0}}, y{{3, 4}};
  const auto d = peecs::ospa(x, y, OspaParams{});
  EXPECT_DOUBLE_EQ(d.total, 5.0);
  EXPECT_DOUBLE_EQ(d.localization, 5.0);
  EXPECT_DOUBLE_EQ(d.cardinality, 0.0);
}

TEST(Ospa, DistanceIsCutOff) {
  const std::vector<Position> x{{0, 0}}, y{{300, 400}};
  EXPECT_DOUBLE_EQ(peecs::ospa(x, y, OspaParams{}).total, 100.0);
}

TEST(Ospa, InvalidParamsThrow) {
  EXPECT_THROW((void)peecs::ospa({}, {}, OspaParams{0.0, 2.0}), peecs::Error);
  EXPECT_THROW((void)peecs::ospa({}, {}, OspaParams{100.0, 0.5}), peecs::Error);
}

TEST(Ospa, MatchesBruteForce) {
  Rng rng{81};
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = random_set(rng, peecs::testing::uniform_index(rng, 0, 6));
    const auto y = random_set(rng, peecs::testing::uniform_index(rng, 0, 6));
    const double p = trial % 3 == 0 ? 1.0 : 2.0;
    const auto got = peecs::ospa(x, y, OspaParams{100.0, p});
    const auto expected = peecs::oracle::ospa(pairs(x), pairs(y), 100.0, p);
    EXPECT_NEAR(got.total, expected[0], 1e-9);
    EXPECT_NEAR(got.localization, expected[1], 1e-9);
    EXPECT_NEAR(got.cardinality, expected[2], 1e-9);
  }
}

TEST(Ospa, MetricPropertiesHold) {
  Rng rng{82};
  const OspaParams params;
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_set(rng, peecs::testing::uniform_index(rng, 0, 5));
    const auto y = random_set(rng, peecs::testing::uniform_index(rng, 0, 5));
    const auto z = random_set(rng, peecs::testing::uniform_index(rng, 0, 5));
    const double xy = peecs::ospa(x, y, params).total;
    const double yx = peecs::ospa(y, x, params).total;
    EXPECT_NEAR(xy, yx, 1e-9);
    EXPECT_GE(xy, 0.0);
    EXPECT_LE(xy, params.cutoff + 1e-12);
    EXPECT_NEAR(peecs::ospa(x, x, params).total, 0.0, 1e-12);
    EXPECT_LE(peecs::ospa(x, z, params).total, xy + peecs::ospa(y, z, params).total + 1e-9);
    if (x.size() == y.size()) {
      EXPECT_EQ(peecs::ospa(x, y, params).cardinality, 0.0);
    }
  }
}

}  // namespace
