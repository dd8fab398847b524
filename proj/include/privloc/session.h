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


#ifndef PRIVLOC_SESSION_H_
#define PRIVLOC_SESSION_H_

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "privloc/entities.h"
#include "privloc/gdop.h"
#include "privloc/message.h"
#include "privloc/paillier.h"
#include "privloc/toa.h"
#include "privloc/transcript.h"
#include "privloc/zero_sum_noise.h"

namespace privloc {

struct ProtocolConfig {
  size_t key_bits = 512;
  int frac_bits = kDefaultFracBits;
  NoiseConfig noise;
  // Selection size n; nullopt runs every round over all anchors.
  std::optional<size_t> selection_n;
};

// Inputs of one round. anchors[k] is the position of anchor id k + 1 and
// observations[k] its ranging exchange with the target.
struct RoundInputs {
  int round = 0;
  std::vector<Position> anchors;
  std::vector<RangeObservation> observations;
};

// Process CPU time per phase, in milliseconds.
struct PhaseTimes {
  double zsng_ms = 0.0;
  double nsa_ms = 0.0;
  double loc_ms = 0.0;
};

struct RoundOutput {
  Position estimate;
  // Anchor ids used for localization this round.
  std::vector<int> used_anchors;
  // Present when the selection pass ran this round.
  std::optional<SelectionResult> selection;
  // Set for the next round: the selection when it ran, else all anchors.
  std::vector<int> next_selection;
  PhaseTimes times;
  std::array<mpz_class, 16> recovered_gram;
  ResidueVec4 recovered_c;
  ResidueVec4 recovered_e;
  // Encoded residues each entity must keep to itself, for leak scans.
  std::map<EntityId, std::vector<mpz_class>> secrets;
};

// Expected per-kind message counts for one round.
std::map<MessageKind, uint64_t> ExpectedMessageCounts(size_t localization_anchors,
                                                      size_t total_anchors,
                                                      bool selection_runs,
                                                      bool distributes_keys);

// One target, `anchor_count` anchors and the aggregator, sharing a keypair
// for the whole session. Protocol randomness derives from `seed`; zero-sum
// noise derives separately from `noise_seed`, so re-running with another
// noise seed changes every mask but nothing else.
class PrivateLocalizationSession {
 public:
  PrivateLocalizationSession(const ProtocolConfig& config, size_t anchor_count,
                             uint64_t seed, uint64_t noise_seed,
                             Transcript* transcript);
  // Same, with an externally generated keypair.
  PrivateLocalizationSession(const ProtocolConfig& config, size_t anchor_count,
                             PaillierKeyPair keys, uint64_t seed,
                             uint64_t noise_seed, Transcript* transcript);

  // Runs one full round. An empty previous_selection means all anchors.
  RoundOutput RunRound(const RoundInputs& inputs,
                       const std::vector<int>& previous_selection);

  const PaillierPublicKey& public_key() const { return target_.public_key(); }
  const TargetNode& target() const { return target_; }
  const AggregatorNode& aggregator() const { return aggregator_; }
  const AnchorNode& anchor(int id) const { return anchors_.at(id - 1); }
  const ProtocolConfig& config() const { return config_; }
  // Noise family of the last round.
  const NoiseFamily& last_noise() const { return noise_; }

 private:
  void Send(ProtocolMessage& msg);
  void DistributeKeys(int round);

  ProtocolConfig config_;
  size_t anchor_count_;
  Rng noise_root_;
  Transcript* transcript_;
  TargetNode target_;
  std::vector<AnchorNode> anchors_;
  AggregatorNode aggregator_;
  bool keys_distributed_ = false;
  NoiseFamily noise_;
};

}  // namespace privloc

#endif  // PRIVLOC_SESSION_H_
