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


#include "privloc/gdop.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "privloc/random.h"
#include "privloc/status.h"

namespace privloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Rows = Eigen::Matrix<double, Eigen::Dynamic, 3>;

std::vector<int> Ids(size_t m) {
  std::vector<int> ids(m);
  for (size_t i = 0; i < m; ++i) ids[i] = static_cast<int>(i) + 1;
  return ids;
}

Rows RandomRows(size_t m, Rng& rng) {
  Rows rows(m, 3);
  for (size_t i = 0; i < m; ++i) {
    Eigen::Vector3d v(rng.Normal(0, 1), rng.Normal(0, 1), rng.Normal(0, 1));
    rows.row(static_cast<Eigen::Index>(i)) = v.normalized().transpose();
  }
  return rows;
}

// trace((H^T H)^-1) by explicit inverse.
double GdopSquaredOracle(const Rows& h) {
  const Eigen::Matrix3d g = h.transpose() * h;
  return g.inverse().trace();
}

Rows HandRows() {
  Rows h(4, 3);
  h << 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0;
  return h;
}

TEST(Gdop, HandExample) {
  const ObservationMatrix h(HandRows(), Ids(4));
  // (H^T H)^-1 = diag(1/2, 1, 1).
  EXPECT_DOUBLE_EQ(Gdop(h), std::sqrt(2.5));
  EXPECT_EQ(Contribution(h, 0), 0.5);
  EXPECT_EQ(Contribution(h, 3), 0.5);
  EXPECT_EQ(Contribution(h, 1), kInf);
  EXPECT_EQ(Contribution(h, 2), kInf);
}

TEST(Gdop, SingularAndSmallMatrices) {
  Rows same(4, 3);
  same << 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0;
  EXPECT_EQ(Gdop(ObservationMatrix(same, Ids(4))), kInf);
  const ObservationMatrix three(Rows(Eigen::Matrix3d::Identity()), Ids(3));
  EXPECT_DOUBLE_EQ(Gdop(three), std::sqrt(3.0));
  EXPECT_EQ(Contribution(three, 0), kInf);
  EXPECT_THROW(Contribution(three, 3), Error);
}

TEST(Gdop, ContributionMatchesLeaveOneOut) {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const size_t m = 5 + rng.NextU64() % 26;
    const Rows rows = RandomRows(m, rng);
    const ObservationMatrix h(rows, Ids(m));
    const double full = GdopSquaredOracle(rows);
    for (size_t i = 0; i < m; ++i) {
      const ObservationMatrix dropped = h.WithoutRow(i);
      const double brute = GdopSquaredOracle(dropped.rows()) - full;
      ASSERT_NEAR(Contribution(h, i), brute, 1e-9 * std::abs(brute));
    }
  }
}

TEST(ObservationMatrix, Validation) {
  Rows bad(1, 3);
  bad << 1, 1, 0;
  EXPECT_THROW(ObservationMatrix(bad, {1}), Error);
  EXPECT_THROW(ObservationMatrix(HandRows(), Ids(3)), Error);
}

TEST(ObservationMatrix, FromPositions) {
  const std::vector<Position> anchors{{3, 4, 0}, {0, 0, 10}};
  const std::vector<int> ids{5, 9};
  const auto h = ObservationMatrix::FromPositions({0, 0, 0}, anchors, ids);
  EXPECT_NEAR(h.rows()(0, 0), -0.6, 1e-15);
  EXPECT_NEAR(h.rows()(0, 1), -0.8, 1e-15);
  EXPECT_NEAR(h.rows()(1, 2), -1.0, 1e-15);
  EXPECT_EQ(h.anchor_ids(), ids);
  try {
    ObservationMatrix::FromPositions({3, 4, 0}, anchors, ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateGeometry);
  }
}

TEST(NsaGreedy, HandTieGoesToLowestId) {
  const SelectionResult r = NsaGreedy(ObservationMatrix(HandRows(), Ids(4)), 3);
  ASSERT_EQ(r.removal_trace.size(), 1u);
  EXPECT_EQ(r.removal_trace[0].first, 1);
  EXPECT_EQ(r.removal_trace[0].second, 0.5);
  EXPECT_EQ(r.selected, (std::vector<int>{2, 3, 4}));
}

TEST(NsaGreedy, NoRemovalWhenSmallEnough) {
  const SelectionResult r = NsaGreedy(ObservationMatrix(HandRows(), Ids(4)), 4);
  EXPECT_TRUE(r.removal_trace.empty());
  EXPECT_EQ(r.selected, Ids(4));
  EXPECT_THROW(NsaGreedy(ObservationMatrix(HandRows(), Ids(4)), 2), Error);
}

TEST(NsaGreedy, AllEssentialFallsBackToLowestId) {
  // Every row lies in the xy-plane, so H^T H is singular throughout.
  Rows planar(4, 3);
  const double s = std::sqrt(0.5);
  planar << 1, 0, 0, 0, 1, 0, s, s, 0, s, -s, 0;
  const SelectionResult r = NsaGreedy(ObservationMatrix(planar, {7, 3, 9, 4}), 3);
  ASSERT_EQ(r.removal_trace.size(), 1u);
  EXPECT_EQ(r.removal_trace[0].first, 3);
  EXPECT_EQ(r.removal_trace[0].second, kInf);
}

TEST(NsaGreedy, FiniteBeatsEssential) {
  // Ids 2 and 8 duplicate x and tie; ids 5 and 1 are essential.
  const SelectionResult r = NsaGreedy(ObservationMatrix(HandRows(), {2, 5, 1, 8}), 3);
  EXPECT_EQ(r.removal_trace[0].first, 2);
}

TEST(NsaGreedy, MatchesBruteForceGreedy) {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const size_t m = 16 + rng.NextU64() % 15;
    const Rows rows = RandomRows(m, rng);
    ObservationMatrix current(rows, Ids(m));
    const SelectionResult r = NsaGreedy(current, 15);
    ASSERT_EQ(r.removal_trace.size(), m - 15);
    for (const auto& [id, delta] : r.removal_trace) {
      size_t best = 0;
      double best_gdop = kInf;
      for (size_t i = 0; i < current.size(); ++i) {
        const double g = GdopSquaredOracle(current.WithoutRow(i).rows());
        if (g < best_gdop) {
          best_gdop = g;
          best = i;
        }
      }
      ASSERT_EQ(id, current.anchor_ids()[best]);
      current = current.WithoutRow(best);
    }
    EXPECT_EQ(r.selected, current.anchor_ids());
  }
}

class ReconstructTest : public ::testing::Test {
 protected:
  const mpz_class n{"1000000000000000000000007"};
  const SignedFixedCodec codec{12, n};
  Rng rng{4};

  // Zero-sum masks over target + anchors {1, 2, 3}; candidate 2.
  std::vector<MaskedDirection> Shares(const Position& p0, const Position& p2) {
    std::array<DirectionMask, 4> masks;
    for (int k = 0; k < 3; ++k) {
      mpz_class sum = 0;
      for (int p = 1; p < 4; ++p) {
        masks[p][k] = rng.RandomBelow(n);
        sum += masks[p][k];
      }
      masks[0][k] = (n - sum % n) % n;
    }
    std::vector<MaskedDirection> out(4);
    const std::array<double, 3> t{p0.x, p0.y, p0.z}, a{p2.x, p2.y, p2.z};
    out[0].sender = EntityId::Target();
    for (int k = 0; k < 3; ++k) out[0].values[k] = (masks[0][k] + codec.Encode(t[k])) % n;
    for (int p = 1; p < 4; ++p) {
      out[p].sender = EntityId::Anchor(p);
      for (int k = 0; k < 3; ++k) {
        out[p].values[k] = masks[p][k];
        if (p == 2) out[p].values[k] = (out[p].values[k] + codec.Encode(-a[k])) % n;
      }
    }
    return out;
  }
};

TEST_F(ReconstructTest, RecoversUnitDirection) {
  const std::vector<int> parts{1, 2, 3};
  const auto shares = Shares({10, 20, 30}, {13, 24, 30});
  const Eigen::Vector3d h = ReconstructDirection(shares, 2, parts, codec);
  EXPECT_NEAR(h.x(), -0.6, 1e-12);
  EXPECT_NEAR(h.y(), -0.8, 1e-12);
  EXPECT_NEAR(h.z(), 0.0, 1e-12);
}

TEST_F(ReconstructTest, Errors) {
  const std::vector<int> parts{1, 2, 3};
  auto shares = Shares({10, 20, 30}, {13, 24, 30});
  auto code = [&](std::vector<MaskedDirection> s, int cand) {
    try {
      ReconstructDirection(s, cand, parts, codec);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code({shares.begin(), shares.end() - 1}, 2), ErrorCode::kProtocolIncomplete);
  auto dup = shares;
  dup.push_back(shares[1]);
  EXPECT_EQ(code(dup, 2), ErrorCode::kProtocolIncomplete);
  EXPECT_EQ(code(shares, 5), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code(Shares({1, 2, 3}, {1, 2, 3}), 2), ErrorCode::kDegenerateGeometry);
}

}  // namespace
}  // namespace privloc
