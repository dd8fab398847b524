/*
 * Copyright 2026 The privloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "privloc/toa.h"

#include <gtest/gtest.h>

#include <algorithm>

#include <cmath>
#include <vector>

#include "privloc/random.h"
#include "privloc/status.h"

namespace privloc {
namespace {

RangeObservation ExactRange(const Position& target, const Position& anchor, int id,
                            double t_send) {
  Rng unused(0);
  return SimulateRange(target, anchor, id, t_send, 0.0, unused);
}

TEST(MakeDesignRow, HandExample) {
  const Position anchor{1, 2, 3};
  RangeObservation obs;
  obs.tau_send = 10.0;
  obs.tau_recv = 15.0;  // d = 5
  const DesignRow row = MakeDesignRow(obs, anchor);
  EXPECT_EQ(row.alpha, Eigen::Vector4d(-2, -4, -6, 1));
  EXPECT_DOUBLE_EQ(row.b, 25.0 - 14.0);
  EXPECT_DOUBLE_EQ(row.gamma, 225.0 - 14.0);
}

TEST(SplitRangeTerm, AgreesWithDirectForm) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Position target{rng.Uniform(0, 1000), rng.Uniform(0, 1000), rng.Uniform(0, 100)};
    const Position anchor{rng.Uniform(0, 1000), rng.Uniform(0, 1000), rng.Uniform(0, 100)};
    const auto obs = SimulateRange(target, anchor, 1, rng.Uniform(0, 1e-3), 6.1, rng);
    const double direct = MakeDesignRow(obs, anchor).b;
    // The split form cancels terms near 1e11 m^2.
    EXPECT_NEAR(SplitRangeTerm(obs, anchor), direct, 1e11 * 1e-13 + 1e-9 * std::abs(direct));
  }
}

TEST(SimulateRange, NoiselessRangeIsDistance) {
  const Position t{100, 200, 30}, a{400, 600, 30};
  const auto obs = ExactRange(t, a, 7, 2.5e-4);
  EXPECT_EQ(obs.anchor_id, 7);
  EXPECT_NEAR(obs.range(), 500.0, 1e-7);
  EXPECT_DOUBLE_EQ(obs.tau_send, kSpeedOfLight * 2.5e-4);
}

TEST(SimulateRange, NoiseStandardDeviation) {
  Rng rng(8);
  const Position t{0, 0, 0}, a{300, 400, 0};
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double e = SimulateRange(t, a, 1, 0.0, 6.1, rng).range() - 500.0;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  const double expected = 6.1e-9 * kSpeedOfLight;  // about 1.83 m
  EXPECT_NEAR(sd, expected, 0.03 * expected);
  EXPECT_NEAR(mean, 0.0, 5 * expected / std::sqrt(n));
}

TEST(LocalizePlain, NoiselessRecoversTarget) {
  const Position target{10, 20, 5};
  const std::vector<Position> anchors{{0, 0, 0}, {100, 0, 10}, {0, 100, 20}, {100, 100, 50},
                                      {50, 50, 90}};
  std::vector<RangeObservation> obs;
  for (size_t i = 0; i < anchors.size(); ++i) {
    obs.push_back(ExactRange(target, anchors[i], static_cast<int>(i) + 1, 1e-4));
  }
  const LsSolution sol = LocalizePlain(obs, anchors);
  EXPECT_NEAR(sol.position.x, 10, 1e-5);
  EXPECT_NEAR(sol.position.y, 20, 1e-5);
  EXPECT_NEAR(sol.position.z, 5, 1e-5);
  EXPECT_NEAR(sol.r0, target.SquaredNorm(), 1e-3);
}

TEST(LocalizePlain, ShapeErrors) {
  const std::vector<Position> anchors{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  std::vector<RangeObservation> obs(3);
  try {
    LocalizePlain(obs, anchors);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnderdetermined);
  }
  std::vector<RangeObservation> four(4);
  try {
    LocalizePlain(four, anchors);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(LocalizePlain, CoplanarAnchorsRejected) {
  const Position target{10, 20, 5};
  const std::vector<Position> anchors{{0, 0, 7}, {100, 0, 7}, {0, 100, 7}, {100, 100, 7},
                                      {50, 20, 7}};
  std::vector<RangeObservation> obs;
  for (size_t i = 0; i < anchors.size(); ++i) {
    obs.push_back(ExactRange(target, anchors[i], static_cast<int>(i) + 1, 0.0));
  }
  EXPECT_THROW(LocalizePlain(obs, anchors), GeometryError);
}

TEST(SolveNormalEquations, IdentitySystem) {
  const LsSolution sol =
      SolveNormalEquations(Eigen::Matrix4d::Identity(), Eigen::Vector4d(1, 2, 3, 4));
  EXPECT_EQ(sol.position, (Position{1, 2, 3}));
  EXPECT_EQ(sol.r0, 4);
  EXPECT_DOUBLE_EQ(sol.condition, 1.0);
}

TEST(QuantizedNormalEquations, RepeatedAnchorIsScaledRankOneOnGrid) {
  // Anchor and timestamps on the 2^-12 grid, so quantization is exact.
  const Position anchor{1.5, -2.25, 0.125};
  RangeObservation obs;
  obs.tau_send = 0.5;
  obs.tau_recv = 3.75;
  const std::vector<Position> anchors(4, anchor);
  const std::vector<RangeObservation> observations(4, obs);
  const auto ne = BuildQuantizedNormalEquations(observations, anchors, 12);
  const DesignRow row = MakeDesignRow(obs, anchor);
  const Eigen::Matrix4d gram = ne.GramAsDouble();
  const Eigen::Vector4d atb = ne.AtbAsDouble();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_EQ(gram(r, c), 4 * row.alpha(r) * row.alpha(c));
    EXPECT_EQ(atb(r), 4 * row.alpha(r) * row.b);
  }
}

TEST(LocalizeQuantized, DeviationShrinksWithLatticeStep) {
  Rng rng(21);
  double sum12 = 0, sum16 = 0, worst16 = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Position target{rng.Uniform(0, 1000), rng.Uniform(0, 1000), rng.Uniform(0, 100)};
    std::vector<Position> anchors;
    std::vector<RangeObservation> obs;
    for (int i = 0; i < 12; ++i) {
      anchors.push_back({rng.Uniform(0, 1000), rng.Uniform(0, 1000), rng.Uniform(0, 100)});
      obs.push_back(SimulateRange(target, anchors.back(), i + 1, rng.Uniform(0, 1e-3), 6.1, rng));
    }
    const Position p = LocalizePlain(obs, anchors).position;
    const double d12 = Distance(p, LocalizeQuantized(obs, anchors, 12).position);
    const double d16 = Distance(p, LocalizeQuantized(obs, anchors, 16).position);
    sum12 += d12;
    sum16 += d16;
    worst16 = std::max(worst16, d16);
  }
  // Rounding error is linear in the step, so 4 extra bits buy about 16x.
  EXPECT_GT(sum12 / sum16, 8.0);
  EXPECT_LT(sum12 / sum16, 32.0);
  EXPECT_LE(worst16, 1e-3);
}

}  // namespace
}  // namespace privloc
