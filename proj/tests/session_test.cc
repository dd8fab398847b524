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


#include "privloc/session.h"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "privloc/experiment.h"
#include "privloc/status.h"

namespace privloc {
namespace {

constexpr size_t kKeyBits = 256;

ProtocolConfig Config(std::optional<size_t> n) {
  ProtocolConfig c;
  c.key_bits = kKeyBits;
  c.selection_n = n;
  return c;
}

struct Fixture {
  Scenario scenario;
  std::vector<std::vector<RangeObservation>> obs;
};

Fixture MakeFixture(size_t m, size_t rounds, uint64_t seed, double max_speed = 10.0) {
  ExperimentConfig cfg;
  cfg.duration_s = static_cast<double>(rounds);
  cfg.max_speed = max_speed;
  Rng rng(seed);
  Fixture f{GenerateScenario(cfg, m, rng), {}};
  for (const auto& anchors : f.scenario.anchors) {
    f.obs.push_back(SimulateRound(f.scenario.target, anchors, 6.1, rng));
  }
  return f;
}

RoundInputs Inputs(const Fixture& f, size_t round) {
  return RoundInputs{static_cast<int>(round), f.scenario.anchors[round], f.obs[round]};
}

std::map<MessageKind, uint64_t> CountKinds(const Transcript& t, int round) {
  std::map<MessageKind, uint64_t> out;
  for (int k = 0; k <= static_cast<int>(MessageKind::kSelection); ++k) {
    out[static_cast<MessageKind>(k)] = 0;
  }
  for (const auto& m : t.messages()) {
    if (m.round == round) ++out[m.kind];
  }
  return out;
}

TEST(Session, BootstrapThenSelectedRound) {
  const Fixture f = MakeFixture(8, 2, 1);
  Transcript t(WireFormat::Strict(kKeyBits));
  PrivateLocalizationSession s(Config(5), 8, 11, 12, &t);
  const RoundOutput r0 = s.RunRound(Inputs(f, 0), {});
  EXPECT_EQ(r0.used_anchors, (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}));
  ASSERT_TRUE(r0.selection.has_value());
  EXPECT_EQ(r0.next_selection.size(), 5u);
  EXPECT_EQ(r0.selection->removal_trace.size(), 3u);
  const RoundOutput r1 = s.RunRound(Inputs(f, 1), r0.next_selection);
  EXPECT_EQ(r1.used_anchors, r0.next_selection);
}

TEST(Session, MessageCountsMatchHandCount) {
  const Fixture f = MakeFixture(8, 2, 2);
  Transcript t(WireFormat::Strict(kKeyBits));
  PrivateLocalizationSession s(Config(5), 8, 3, 4, &t);
  const RoundOutput r0 = s.RunRound(Inputs(f, 0), {});
  s.RunRound(Inputs(f, 1), r0.next_selection);

  // Round 0, m = 8 localizing anchors, selection over all 8:
  //   keys 8 + 1, noise 2*8 + 8*8 anchor messages and 2 + 8 sums,
  //   8 each of Gram, Gamma, t_0i and chi, one tau list, one e,
  //   9 shares per candidate and one selection.
  const std::map<MessageKind, uint64_t> round0{
      {MessageKind::kPublicKeyDist, 9}, {MessageKind::kEncNoise, 80},
      {MessageKind::kEncNoiseSum, 10},  {MessageKind::kMaskedGram, 8},
      {MessageKind::kMaskedGamma, 8},   {MessageKind::kEncTargetTimestamp, 8},
      {MessageKind::kChi, 8},           {MessageKind::kPlainTimestamp, 1},
      {MessageKind::kEVector, 1},       {MessageKind::kMaskedQ, 72},
      {MessageKind::kSelection, 1}};
  EXPECT_EQ(CountKinds(t, 0), round0);
  EXPECT_EQ(ExpectedMessageCounts(8, 8, true, true), round0);
  // Round 1 localizes with 5 anchors and reselects over 8; keys are not resent.
  std::map<MessageKind, uint64_t> round1 = round0;
  round1[MessageKind::kPublicKeyDist] = 0;
  round1[MessageKind::kEncNoise] = 2 * 5 + 64;
  for (auto k : {MessageKind::kMaskedGram, MessageKind::kMaskedGamma,
                 MessageKind::kEncTargetTimestamp, MessageKind::kChi}) {
    round1[k] = 5;
  }
  EXPECT_EQ(CountKinds(t, 1), round1);
  EXPECT_EQ(ExpectedMessageCounts(5, 8, true, false), round1);
}

TEST(Session, BitLedgerConservation) {
  const Fixture f = MakeFixture(7, 1, 3);
  Transcript t(WireFormat::Paper(kKeyBits));
  PrivateLocalizationSession s(Config(4), 7, 5, 6, &t);
  s.RunRound(Inputs(f, 0), {});
  uint64_t by_message = 0;
  for (const auto& m : t.messages()) {
    EXPECT_EQ(m.bit_size, BitSize(m.payload, t.format()));
    by_message += m.bit_size;
  }
  uint64_t by_link = 0;
  for (const auto& [link, bits] : t.link_bits()) by_link += bits;
  EXPECT_EQ(by_message, t.total_bits());
  EXPECT_EQ(by_link, t.total_bits());
  // One Chi message: 4 ciphertexts of 2k bits.
  EXPECT_EQ(t.Totals(MessageKind::kChi).bits, 7u * 4u * 2u * kKeyBits);
  // MaskedGram: 16 masked values of 24 bits.
  EXPECT_EQ(t.Totals(MessageKind::kMaskedGram).bits, 7u * 16u * 24u);
  // Public key: n at k bits plus g at 2k bits, to 7 anchors and the aggregator.
  EXPECT_EQ(t.Totals(MessageKind::kPublicKeyDist).bits, 8u * 3u * kKeyBits);
}

TEST(Session, PrivateEstimateEqualsQuantizedOracleEveryRound) {
  const Fixture f = MakeFixture(10, 3, 4);
  Transcript t(WireFormat::Strict(kKeyBits), false);
  PrivateLocalizationSession s(Config(6), 10, 7, 8, &t);
  std::vector<int> sel;
  for (size_t r = 0; r < 3; ++r) {
    const RoundOutput out = s.RunRound(Inputs(f, r), sel);
    std::vector<Position> anchors;
    std::vector<RangeObservation> obs;
    for (int id : out.used_anchors) {
      anchors.push_back(f.scenario.anchors[r][id - 1]);
      obs.push_back(f.obs[r][id - 1]);
    }
    EXPECT_EQ(out.estimate, LocalizeQuantized(obs, anchors, kDefaultFracBits).position);
    sel = out.next_selection;
  }
}

TEST(Session, SelectionMatchesPlaintextGreedy) {
  const Fixture f = MakeFixture(12, 1, 5);
  Transcript t(WireFormat::Strict(kKeyBits), false);
  PrivateLocalizationSession s(Config(6), 12, 9, 10, &t);
  const RoundOutput out = s.RunRound(Inputs(f, 0), {});
  // Directions from the estimate to grid-rounded anchor positions.
  std::vector<Position> grid;
  for (const auto& a : f.scenario.anchors[0]) {
    grid.push_back({std::round(a.x * 4096) / 4096, std::round(a.y * 4096) / 4096,
                    std::round(a.z * 4096) / 4096});
  }
  const Position est{std::round(out.estimate.x * 4096) / 4096,
                     std::round(out.estimate.y * 4096) / 4096,
                     std::round(out.estimate.z * 4096) / 4096};
  std::vector<int> ids(12);
  std::iota(ids.begin(), ids.end(), 1);
  const auto h = ObservationMatrix::FromPositions(est, grid, ids);
  for (size_t i = 0; i < 12; ++i) {
    const Eigen::Vector3d got = s.aggregator().last_directions().at(ids[i]);
    EXPECT_LE((got - h.rows().row(static_cast<Eigen::Index>(i)).transpose()).norm(), 1e-12);
  }
  EXPECT_EQ(out.next_selection, NsaGreedy(h, 6).selected);
}

TEST(Session, NoSelectionWhenFewAnchors) {
  const Fixture f = MakeFixture(6, 1, 6);
  Transcript t(WireFormat::Strict(kKeyBits));
  PrivateLocalizationSession s(Config(15), 6, 1, 2, &t);
  const RoundOutput out = s.RunRound(Inputs(f, 0), {});
  EXPECT_FALSE(out.selection.has_value());
  EXPECT_EQ(out.next_selection.size(), 6u);
  EXPECT_EQ(t.Totals(MessageKind::kMaskedQ).messages, 0u);
  EXPECT_EQ(t.Totals(MessageKind::kSelection).messages, 0u);
}

TEST(Session, StationaryRoundsTrackRawToA) {
  const Fixture f = MakeFixture(9, 5, 7, /*max_speed=*/0.0);
  Transcript t(WireFormat::Strict(kKeyBits), false);
  PrivateLocalizationSession s(Config(std::nullopt), 9, 3, 3, &t);
  double sq = 0;
  for (size_t r = 0; r < 5; ++r) {
    const RoundOutput out = s.RunRound(Inputs(f, r), {});
    const Position raw = LocalizePlain(f.obs[r], f.scenario.anchors[r]).position;
    EXPECT_LE(Distance(out.estimate, raw), 1e-3);
    const double e = Distance(out.estimate, f.scenario.target);
    sq += e * e;
  }
  // 1.83 m ranging noise; GDOP of random 9-anchor layouts stays well under 20.
  EXPECT_LT(std::sqrt(sq / 5), 40.0);
}

TEST(Session, FreshNoiseEachRound) {
  const Fixture f = MakeFixture(6, 2, 8);
  Transcript t(WireFormat::Strict(kKeyBits), false);
  PrivateLocalizationSession s(Config(std::nullopt), 6, 1, 2, &t);
  s.RunRound(Inputs(f, 0), {});
  const GramMask first = s.last_noise().gram[1];
  s.RunRound(Inputs(f, 1), {});
  for (size_t e = 0; e < 16; ++e) EXPECT_NE(first[e], s.last_noise().gram[1][e]);
}

TEST(Session, ErrorsCarryRoundContext) {
  const Fixture f = MakeFixture(6, 1, 9);
  Transcript t(WireFormat::Strict(kKeyBits));
  PrivateLocalizationSession s(Config(std::nullopt), 6, 1, 2, &t);
  RoundInputs in = Inputs(f, 0);
  in.round = 3;
  try {
    s.RunRound(in, {1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnderdetermined);
    EXPECT_NE(std::string(e.what()).find("round 3"), std::string::npos);
  }
  in.anchors.pop_back();
  try {
    s.RunRound(in, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(PrivateLocalizationSession(Config(3), 6, 1, 2, &t), Error);
  EXPECT_THROW(PrivateLocalizationSession(Config(5), 3, 1, 2, &t), Error);
}

TEST(Session, JsonLinesExport) {
  const Fixture f = MakeFixture(5, 1, 10);
  Transcript t(WireFormat::Strict(kKeyBits));
  PrivateLocalizationSession s(Config(std::nullopt), 5, 1, 2, &t);
  s.RunRound(Inputs(f, 0), {});
  std::stringstream ss;
  t.WriteJsonLines(ss);
  std::string line;
  size_t lines = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.size(), 6u);
    EXPECT_EQ(j.at("payload_digest").get<std::string>().size(), 64u);
    ++lines;
  }
  EXPECT_EQ(lines, t.messages().size());
}

}  // namespace
}  // namespace privloc
