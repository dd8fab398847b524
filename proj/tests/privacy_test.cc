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


#include "privloc/privacy.h"

#include <gtest/gtest.h>

#include "privloc/experiment.h"
#include "privloc/session.h"
#include "privloc/status.h"

namespace privloc {
namespace {

constexpr size_t kKeyBits = 256;

struct Trace {
  Transcript transcript{WireFormat::Strict(kKeyBits)};
  std::map<EntityId, std::vector<mpz_class>> secrets;
  std::vector<RoundOutput> outputs;
};

class PrivacyTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ExperimentConfig cfg;
    cfg.duration_s = 2;
    Rng rng(5);
    scenario_ = GenerateScenario(cfg, 7, rng);
    for (const auto& a : scenario_.anchors) {
      obs_.push_back(SimulateRound(scenario_.target, a, 6.1, rng));
    }
    Rng key_rng(6);
    keys_ = GenerateKeyPair(kKeyBits, key_rng);
  }

  Trace Execute(uint64_t noise_seed, bool zero_noise = false) const {
    Trace run;
    ProtocolConfig cfg;
    cfg.key_bits = kKeyBits;
    cfg.selection_n = 5;
    cfg.noise.zero_noise = zero_noise;
    PrivateLocalizationSession s(cfg, 7, keys_, 99, noise_seed, &run.transcript);
    std::vector<int> sel;
    for (size_t r = 0; r < obs_.size(); ++r) {
      RoundOutput out = s.RunRound({static_cast<int>(r), scenario_.anchors[r], obs_[r]}, sel);
      sel = out.next_selection;
      for (auto& [who, v] : out.secrets) {
        run.secrets[who].insert(run.secrets[who].end(), v.begin(), v.end());
      }
      run.outputs.push_back(std::move(out));
    }
    return run;
  }

  static bool SameSums(const Trace& a, const Trace& b) {
    for (size_t r = 0; r < a.outputs.size(); ++r) {
      if (a.outputs[r].recovered_gram != b.outputs[r].recovered_gram ||
          a.outputs[r].recovered_c != b.outputs[r].recovered_c ||
          a.outputs[r].recovered_e != b.outputs[r].recovered_e) {
        return false;
      }
    }
    return true;
  }

  static void Inject(Transcript& t, EntityId from, EntityId to, MessageKind kind,
                     std::vector<mpz_class> plain) {
    ProtocolMessage m;
    m.from = from;
    m.to = to;
    m.kind = kind;
    m.payload.plain = std::move(plain);
    t.Send(m);
  }

  Scenario scenario_;
  std::vector<std::vector<RangeObservation>> obs_;
  PaillierKeyPair keys_;
};

TEST_F(PrivacyTest, StandardRoundsPassEveryCheck) {
  const Trace a = Execute(1), b = Execute(2);
  ASSERT_TRUE(SameSums(a, b));
  const ReseedComparison cmp{&b.transcript, true};
  const PrivacyReport report = AdversaryViewChecks(a.transcript, a.secrets, &cmp);
  for (const auto& v : report.violations) {
    ADD_FAILURE() << PrivacyCheckName(v.check) << ": " << v.detail;
  }
  EXPECT_TRUE(report.ok());
}

TEST_F(PrivacyTest, InjectedPlaintextPositionIsCaught) {
  Trace a = Execute(1);
  const mpz_class x = a.secrets.at(EntityId::Anchor(3))[0];
  Inject(a.transcript, EntityId::Anchor(3), EntityId::Aggregator(),
         MessageKind::kPlainTimestamp, {x});
  const PrivacyReport report = AdversaryViewChecks(a.transcript, a.secrets);
  EXPECT_FALSE(report.Passed(PrivacyCheck::kSecretScan));
  EXPECT_TRUE(report.Passed(PrivacyCheck::kAggregatorView));
  EXPECT_TRUE(report.Passed(PrivacyCheck::kNoAnchorToAnchor));
}

TEST_F(PrivacyTest, ZeroNoiseFailsTargetViewCheck) {
  const Trace a = Execute(1, true), b = Execute(2, true);
  const ReseedComparison cmp{&b.transcript, SameSums(a, b)};
  const PrivacyReport report = AdversaryViewChecks(a.transcript, a.secrets, &cmp);
  EXPECT_FALSE(report.Passed(PrivacyCheck::kTargetView));
}

TEST_F(PrivacyTest, ChangedSumsFailTargetViewCheck) {
  const Trace a = Execute(1), b = Execute(2);
  const ReseedComparison cmp{&b.transcript, false};
  EXPECT_FALSE(AdversaryViewChecks(a.transcript, a.secrets, &cmp)
                   .Passed(PrivacyCheck::kTargetView));
}

TEST_F(PrivacyTest, AnchorToAnchorMessageIsCaught) {
  Trace a = Execute(1);
  Inject(a.transcript, EntityId::Anchor(1), EntityId::Anchor(2), MessageKind::kMaskedQ, {});
  EXPECT_FALSE(AdversaryViewChecks(a.transcript, a.secrets)
                   .Passed(PrivacyCheck::kNoAnchorToAnchor));
}

TEST_F(PrivacyTest, WhitelistViolations) {
  Trace a = Execute(1);
  Inject(a.transcript, EntityId::Anchor(1), EntityId::Aggregator(), MessageKind::kMaskedGram,
         {});
  Inject(a.transcript, EntityId::Aggregator(), EntityId::Target(),
         MessageKind::kPlainTimestamp, {});
  const PrivacyReport report = AdversaryViewChecks(a.transcript, a.secrets);
  EXPECT_FALSE(report.Passed(PrivacyCheck::kAggregatorView));
  EXPECT_FALSE(report.Passed(PrivacyCheck::kTargetView));
  EXPECT_TRUE(report.Passed(PrivacyCheck::kSecretScan));
}

TEST_F(PrivacyTest, OwnerMayReceiveItsOwnValues) {
  Trace a = Execute(1);
  const mpz_class x = a.secrets.at(EntityId::Anchor(2))[0];
  Inject(a.transcript, EntityId::Target(), EntityId::Anchor(2),
         MessageKind::kEncTargetTimestamp, {x});
  EXPECT_TRUE(AdversaryViewChecks(a.transcript, a.secrets).Passed(PrivacyCheck::kSecretScan));
}

TEST_F(PrivacyTest, RequiresPayloads) {
  Transcript headers(WireFormat::Strict(kKeyBits), false);
  EXPECT_THROW(AdversaryViewChecks(headers, {}), Error);
}

}  // namespace
}  // namespace privloc
