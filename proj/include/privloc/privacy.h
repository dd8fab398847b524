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


#ifndef PRIVLOC_PRIVACY_H_
#define PRIVLOC_PRIVACY_H_

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "privloc/message.h"
#include "privloc/transcript.h"

namespace privloc {

enum class PrivacyCheck {
  kNoAnchorToAnchor,  // (a)
  kTargetView,        // (b)
  kAggregatorView,    // (c)
  kSecretScan,        // (d)
};

const char* PrivacyCheckName(PrivacyCheck check);

struct PrivacyViolation {
  PrivacyCheck check;
  std::string detail;
};

struct PrivacyReport {
  std::vector<PrivacyViolation> violations;

  bool ok() const { return violations.empty(); }
  bool Passed(PrivacyCheck check) const;
};

// A second run of the same rounds under a different noise seed.
struct ReseedComparison {
  const Transcript* transcript = nullptr;
  // Whether the target recovered identical sums in both runs.
  bool recovered_sums_equal = false;
};

// Honest-but-curious view audit over a transcript that retains payloads.
// `secrets` maps each entity to the encoded residues only it may hold; a
// secret showing up in any message addressed to someone else is a leak.
PrivacyReport AdversaryViewChecks(
    const Transcript& transcript,
    const std::map<EntityId, std::vector<mpz_class>>& secrets,
    const ReseedComparison* reseed = nullptr);

}  // namespace privloc

#endif  // PRIVLOC_PRIVACY_H_
