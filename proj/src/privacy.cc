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

#include <algorithm>
#include <set>

#include "privloc/status.h"

namespace privloc {
namespace {

const std::set<MessageKind>& TargetWhitelist() {
  static const std::set<MessageKind> kinds{
      MessageKind::kEncNoiseSum, MessageKind::kMaskedGram, MessageKind::kMaskedGamma,
      MessageKind::kEVector, MessageKind::kSelection};
  return kinds;
}

const std::set<MessageKind>& AggregatorWhitelist() {
  static const std::set<MessageKind> kinds{
      MessageKind::kPublicKeyDist, MessageKind::kEncNoise, MessageKind::kChi,
      MessageKind::kPlainTimestamp, MessageKind::kMaskedQ};
  return kinds;
}

std::string Describe(const ProtocolMessage& m) {
  return std::string(MessageKindName(m.kind)) + " " + m.from.ToString() + "->" +
         m.to.ToString() + " (round " + std::to_string(m.round) + ")";
}

void CheckWhitelist(const Transcript& t, const EntityId& who,
                    const std::set<MessageKind>& allowed, PrivacyCheck check,
                    PrivacyReport& report) {
  for (const ProtocolMessage* m : t.View(who)) {
    if (!allowed.contains(m->kind)) {
      report.violations.push_back({check, "unexpected " + Describe(*m)});
    }
  }
}

void CheckReseed(const Transcript& t, const ReseedComparison& reseed,
                 PrivacyReport& report) {
  if (!reseed.recovered_sums_equal) {
    report.violations.push_back(
        {PrivacyCheck::kTargetView, "recovered sums changed under noise re-seeding"});
  }
  const auto a = t.View(EntityId::Target());
  const auto b = reseed.transcript->View(EntityId::Target());
  if (a.size() != b.size()) {
    report.violations.push_back(
        {PrivacyCheck::kTargetView, "re-seeded run has a different target view"});
    return;
  }
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i]->kind != b[i]->kind || a[i]->from != b[i]->from ||
        a[i]->payload.masked.size() != b[i]->payload.masked.size()) {
      report.violations.push_back(
          {PrivacyCheck::kTargetView, "re-seeded run diverges at " + Describe(*a[i])});
      return;
    }
    for (size_t k = 0; k < a[i]->payload.masked.size(); ++k) {
      if (a[i]->payload.masked[k] == b[i]->payload.masked[k]) {
        report.violations.push_back({PrivacyCheck::kTargetView,
                                     "masked value " + std::to_string(k) +
                                         " unchanged by re-seeding in " +
                                         Describe(*a[i])});
        break;
      }
    }
  }
}

void ScanSecrets(const Transcript& t,
                 const std::map<EntityId, std::vector<mpz_class>>& secrets,
                 PrivacyReport& report) {
  std::map<mpz_class, std::set<EntityId>> owners;
  for (const auto& [who, values] : secrets) {
    for (const auto& v : values) owners[v].insert(who);
  }
  auto scan = [&](const ProtocolMessage& m, const std::vector<mpz_class>& values,
                  const char* field) {
    for (const auto& v : values) {
      auto it = owners.find(v);
      if (it == owners.end()) continue;
      for (const EntityId& owner : it->second) {
        if (owner == m.to) continue;
        report.violations.push_back({PrivacyCheck::kSecretScan,
                                     "secret of " + owner.ToString() + " in " +
                                         field + " of " + Describe(m)});
      }
    }
  };
  for (const ProtocolMessage& m : t.messages()) {
    std::vector<mpz_class> cts;
    cts.reserve(m.payload.ciphertexts.size());
    for (const auto& c : m.payload.ciphertexts) cts.push_back(c.value());
    scan(m, cts, "ciphertexts");
    scan(m, m.payload.masked, "masked values");
    scan(m, m.payload.plain, "plain values");
  }
}

}  // namespace

const char* PrivacyCheckName(PrivacyCheck check) {
  switch (check) {
    case PrivacyCheck::kNoAnchorToAnchor:
      return "no-anchor-to-anchor";
    case PrivacyCheck::kTargetView:
      return "target-view";
    case PrivacyCheck::kAggregatorView:
      return "aggregator-view";
    case PrivacyCheck::kSecretScan:
      return "secret-scan";
  }
  return "unknown";
}

bool PrivacyReport::Passed(PrivacyCheck check) const {
  return std::none_of(violations.begin(), violations.end(),
                      [check](const PrivacyViolation& v) { return v.check == check; });
}

PrivacyReport AdversaryViewChecks(
    const Transcript& transcript,
    const std::map<EntityId, std::vector<mpz_class>>& secrets,
    const ReseedComparison* reseed) {
  if (!transcript.retains_payloads()) {
    throw Error(ErrorCode::kInvalidArgument, "transcript does not retain payloads");
  }
  PrivacyReport report;
  for (const ProtocolMessage& m : transcript.messages()) {
    if (m.from.is_anchor() && m.to.is_anchor()) {
      report.violations.push_back({PrivacyCheck::kNoAnchorToAnchor, Describe(m)});
    }
  }
  CheckWhitelist(transcript, EntityId::Target(), TargetWhitelist(),
                 PrivacyCheck::kTargetView, report);
  if (reseed != nullptr && reseed->transcript != nullptr) {
    CheckReseed(transcript, *reseed, report);
  }
  CheckWhitelist(transcript, EntityId::Aggregator(), AggregatorWhitelist(),
                 PrivacyCheck::kAggregatorView, report);
  ScanSecrets(transcript, secrets, report);
  return report;
}

}  // namespace privloc
