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

#ifndef PRIVLOC_ENTITIES_H_
#define PRIVLOC_ENTITIES_H_

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "privloc/fixed_codec.h"
#include "privloc/gdop.h"
#include "privloc/message.h"
#include "privloc/paillier.h"
#include "privloc/protocol_ops.h"
#include "privloc/random.h"
#include "privloc/toa.h"
#include "privloc/zero_sum_noise.h"

namespace privloc {

// Each node keeps its private state to itself; everything it learns from
// other parties arrives as a ProtocolMessage addressed to it.

class TargetNode {
 public:
  TargetNode(PaillierKeyPair keys, int frac_bits, Rng rng);

  const PaillierPublicKey& public_key() const { return keys_.public_key; }
  const PaillierPrivateKey& private_key() const { return keys_.private_key; }
  const SignedFixedCodec& codec() const { return codec_; }

  ProtocolMessage PublicKeyMessage(int round, const EntityId& to) const;

  // Local transmit timestamps for this round (distance domain).
  void BeginRound(const std::map<int, double>& tau_send);

  // t_0i = Enc(tau_0i) for one anchor.
  ProtocolMessage EncryptedTimestamp(int round, int anchor_id);
  // Plaintext encoded tau_0i for the listed anchors, in order.
  ProtocolMessage PlainTimestamps(int round, std::span<const int> anchor_ids) const;

  // Collects the masked terms and e, solves, and stores the estimate. Every
  // anchor that was sent a timestamp this round must have contributed.
  Position Finalize(std::span<const ProtocolMessage> masked_gram,
                    std::span<const ProtocolMessage> masked_gamma,
                    const ProtocolMessage& e, const GramMask& gram_mask,
                    const GammaMask& gamma_mask);

  // Q_0 + p0_hat for every candidate's direction set.
  std::vector<ProtocolMessage> DirectionShares(
      int round, std::span<const int> candidates,
      std::span<const DirectionMask> masks) const;

  void ReceiveSelection(const ProtocolMessage& selection);

  const std::optional<Position>& estimate() const { return estimate_; }
  const std::vector<int>& selection() const { return selection_; }
  // Values recovered by the last Finalize (integer lattice).
  const std::array<mpz_class, 16>& recovered_gram() const { return gram_; }
  const ResidueVec4& recovered_c() const { return c_; }
  const ResidueVec4& recovered_e() const { return e_; }

 private:
  PaillierKeyPair keys_;
  SignedFixedCodec codec_;
  Rng rng_;
  std::map<int, mpz_class> tau0_;  // quantized, scale S
  std::vector<int> requested_;
  std::optional<Position> estimate_;
  std::vector<int> selection_;
  std::array<mpz_class, 16> gram_;
  ResidueVec4 c_;
  ResidueVec4 e_;
};

class AnchorNode {
 public:
  AnchorNode(int id, int frac_bits, Rng rng);

  int id() const { return id_; }
  EntityId entity() const { return EntityId::Anchor(id_); }

  void ReceivePublicKey(const ProtocolMessage& msg);
  bool has_public_key() const { return pk_.has_value(); }

  // Current position and receive timestamp (distance domain).
  void BeginRound(const Position& position, double tau_recv);
  const QuantizedAnchor& quantized() const { return q_; }

  ProtocolMessage MaskedGram(int round, const GramMask& mask) const;
  ProtocolMessage MaskedGamma(int round, const GammaMask& mask) const;
  ProtocolMessage Chi(int round, const ProtocolMessage& encrypted_timestamp);

  // Q_i - p_i for its own candidacy, raw Q_j for every other candidate.
  std::vector<ProtocolMessage> DirectionShares(
      int round, std::span<const int> candidates,
      std::span<const DirectionMask> masks) const;

 private:
  const PaillierPublicKey& pk() const;

  int id_;
  int frac_bits_;
  Rng rng_;
  std::optional<PaillierPublicKey> pk_;
  std::optional<SignedFixedCodec> codec_;
  QuantizedAnchor q_;
};

class AggregatorNode {
 public:
  explicit AggregatorNode(int frac_bits) : frac_bits_(frac_bits) {}

  void ReceivePublicKey(const ProtocolMessage& msg);

  ProtocolMessage ComputeE(int round, std::span<const ProtocolMessage> chis,
                           const ProtocolMessage& plain_timestamps) const;

  // Rebuilds every candidate's unit direction from the masked shares, runs
  // the greedy selection and returns the Selection message for the target.
  ProtocolMessage Select(int round, std::span<const ProtocolMessage> masked_q,
                         std::span<const int> candidates, size_t n,
                         SelectionResult* result);

  // Directions reconstructed by the last Select, keyed by anchor id.
  const std::map<int, Eigen::Vector3d>& last_directions() const {
    return directions_;
  }

 private:
  const PaillierPublicKey& pk() const;

  int frac_bits_;
  std::optional<PaillierPublicKey> pk_;
  std::optional<SignedFixedCodec> codec_;
  std::map<int, Eigen::Vector3d> directions_;
};

}  // namespace privloc

#endif  // PRIVLOC_ENTITIES_H_
