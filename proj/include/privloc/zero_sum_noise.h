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

#ifndef PRIVLOC_ZERO_SUM_NOISE_H_
#define PRIVLOC_ZERO_SUM_NOISE_H_

#include <gmpxx.h>

#include <array>
#include <span>
#include <vector>

#include "privloc/message.h"
#include "privloc/paillier.h"
#include "privloc/random.h"
#include "privloc/transcript.h"

namespace privloc {

enum class NoiseDistribution {
  kUniform,  // uniform over Z_n
  kBounded,  // uniform over [-2^b, 2^b], for table-width accounting runs
};

struct NoiseConfig {
  NoiseDistribution distribution = NoiseDistribution::kUniform;
  int bound_bits = 23;
  // Debug only: every anchor share is zero, so masks hide nothing.
  bool zero_noise = false;
};

struct NoiseShare {
  EntityId entity;
  mpz_class value;
};

struct EncryptedShare {
  mpz_class share;
  Ciphertext ciphertext;
};

mpz_class DrawNoiseShare(const PaillierPublicKey& pk, const NoiseConfig& config,
                         Rng& rng);

// Anchor step: draw a local share and encrypt it for the aggregator.
EncryptedShare AnchorGenerateAndEncrypt(const PaillierPublicKey& pk,
                                        const NoiseConfig& config, Rng& rng);

// Aggregator step: homomorphic sum. The aggregator never holds sk.
Ciphertext AggregatorSumEncrypted(const PaillierPublicKey& pk,
                                  std::span<const Ciphertext> cts);

// Target step: eps_0 = -(sum of anchor shares) mod n.
NoiseShare TargetDeriveBalancingShare(const PaillierPrivateKey& sk,
                                      const Ciphertext& sum_ct);

using GramMask = std::array<mpz_class, 16>;  // row-major 4x4
using GammaMask = std::array<mpz_class, 4>;
using DirectionMask = std::array<mpz_class, 3>;

// Who takes part in each family. Participant slot 0 is always the target;
// slot k >= 1 is the k-th listed anchor.
struct FamilyLayout {
  // Anchors in the localization set (P and V families).
  std::vector<int> gram_anchor_ids;
  // Anchors in the selection pass; one direction set per candidate, each
  // spanning the target plus all of these anchors. Empty when selection
  // does not run.
  std::vector<int> direction_anchor_ids;
};

struct NoiseFamily {
  FamilyLayout layout;
  std::vector<GramMask> gram;    // [participant]
  std::vector<GammaMask> gamma;  // [participant]
  // [candidate index into direction_anchor_ids][participant]
  std::vector<std::vector<DirectionMask>> direction;

  // Number of scalar zero-sum sets generated (one ZSNG exchange each).
  size_t element_count() const;
  // Sum over elements of the number of contributing anchors.
  size_t anchor_share_count() const;
};

// Runs the three-step exchange once for every scalar element of every
// family. Anchor j draws from noise_root.Fork(family).Fork(j) so anchors
// have independent streams. Messages are recorded in `transcript` when it
// is non-null (one EncNoise per anchor per family instance, one
// EncNoiseSum per family instance).
NoiseFamily ExpandNoiseFamily(const PaillierPublicKey& pk,
                              const PaillierPrivateKey& sk,
                              const FamilyLayout& layout,
                              const NoiseConfig& config, const Rng& noise_root,
                              Transcript* transcript, int round);

// True when every element of every family sums to 0 mod n.
bool SatisfiesZeroSum(const NoiseFamily& family, const mpz_class& n);

}  // namespace privloc

#endif  // PRIVLOC_ZERO_SUM_NOISE_H_
