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

#include "privloc/zero_sum_noise.h"

#include "privloc/status.h"

namespace privloc {
namespace {

constexpr uint64_t kGramStream = 1;
constexpr uint64_t kGammaStream = 2;
constexpr uint64_t kDirectionStream = 3;

// One family instance of `width` scalar elements across the layout's
// anchors. Returns shares[participant][element].
std::vector<std::vector<mpz_class>> RunFamily(
    const PaillierPublicKey& pk, const PaillierPrivateKey& sk,
    const std::vector<int>& anchor_ids, size_t width, const NoiseConfig& config,
    const Rng& family_root, NoiseFamilyTag tag, int candidate,
    Transcript* transcript, int round) {
  if (anchor_ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "noise family needs at least one anchor");
  }
  std::vector<std::vector<mpz_class>> shares(anchor_ids.size() + 1,
                                             std::vector<mpz_class>(width));
  // ciphertexts[element] collects the aggregator's inbox for that element.
  std::vector<std::vector<Ciphertext>> inbox(width);

  for (size_t k = 0; k < anchor_ids.size(); ++k) {
    Rng rng = family_root.Fork(static_cast<uint64_t>(anchor_ids[k]));
    ProtocolMessage msg;
    msg.round = round;
    msg.from = EntityId::Anchor(anchor_ids[k]);
    msg.to = EntityId::Aggregator();
    msg.kind = MessageKind::kEncNoise;
    msg.payload.family = tag;
    msg.payload.candidate = candidate;
    for (size_t e = 0; e < width; ++e) {
      EncryptedShare s = AnchorGenerateAndEncrypt(pk, config, rng);
      shares[k + 1][e] = std::move(s.share);
      msg.payload.ciphertexts.push_back(std::move(s.ciphertext));
    }
    if (transcript != nullptr) transcript->Send(msg);
    for (size_t e = 0; e < width; ++e) {
      inbox[e].push_back(std::move(msg.payload.ciphertexts[e]));
    }
  }

  ProtocolMessage sum_msg;
  sum_msg.round = round;
  sum_msg.from = EntityId::Aggregator();
  sum_msg.to = EntityId::Target();
  sum_msg.kind = MessageKind::kEncNoiseSum;
  sum_msg.payload.family = tag;
  sum_msg.payload.candidate = candidate;
  for (size_t e = 0; e < width; ++e) {
    sum_msg.payload.ciphertexts.push_back(AggregatorSumEncrypted(pk, inbox[e]));
  }
  if (transcript != nullptr) transcript->Send(sum_msg);

  for (size_t e = 0; e < width; ++e) {
    shares[0][e] =
        TargetDeriveBalancingShare(sk, sum_msg.payload.ciphertexts[e]).value;
  }
  return shares;
}

}  // namespace

mpz_class DrawNoiseShare(const PaillierPublicKey& pk, const NoiseConfig& config,
                         Rng& rng) {
  if (config.zero_noise) return 0;
  switch (config.distribution) {
    case NoiseDistribution::kUniform:
      return rng.RandomBelow(pk.n());
    case NoiseDistribution::kBounded: {
      if (config.bound_bits < 1 ||
          static_cast<size_t>(config.bound_bits) + 2 >= pk.bit_length()) {
        throw Error(ErrorCode::kConfig, "noise bound does not fit the modulus");
      }
      mpz_class span;
      mpz_ui_pow_ui(span.get_mpz_t(), 2, config.bound_bits + 1);
      mpz_class offset;
      mpz_ui_pow_ui(offset.get_mpz_t(), 2, config.bound_bits);
      mpz_class v = rng.RandomBelow(span + 1) - offset;
      if (v < 0) v += pk.n();
      return v;
    }
  }
  return 0;
}

EncryptedShare AnchorGenerateAndEncrypt(const PaillierPublicKey& pk,
                                        const NoiseConfig& config, Rng& rng) {
  mpz_class share = DrawNoiseShare(pk, config, rng);
  Ciphertext ct = Encrypt(pk, share, rng);
  return EncryptedShare{std::move(share), std::move(ct)};
}

Ciphertext AggregatorSumEncrypted(const PaillierPublicKey& pk,
                                  std::span<const Ciphertext> cts) {
  return HomSum(pk, cts);
}

NoiseShare TargetDeriveBalancingShare(const PaillierPrivateKey& sk,
                                      const Ciphertext& sum_ct) {
  const mpz_class sum = Decrypt(sk, sum_ct);
  mpz_class eps0 = (sk.n() - sum) % sk.n();
  return NoiseShare{EntityId::Target(), std::move(eps0)};
}

size_t NoiseFamily::element_count() const {
  size_t count = 0;
  if (!gram.empty()) count += 16;
  if (!gamma.empty()) count += 4;
  count += 3 * direction.size();
  return count;
}

size_t NoiseFamily::anchor_share_count() const {
  const size_t gram_anchors = layout.gram_anchor_ids.size();
  const size_t dir_anchors = layout.direction_anchor_ids.size();
  size_t count = 0;
  if (!gram.empty()) count += 16 * gram_anchors;
  if (!gamma.empty()) count += 4 * gram_anchors;
  count += 3 * direction.size() * dir_anchors;
  return count;
}

NoiseFamily ExpandNoiseFamily(const PaillierPublicKey& pk,
                              const PaillierPrivateKey& sk,
                              const FamilyLayout& layout,
                              const NoiseConfig& config, const Rng& noise_root,
                              Transcript* transcript, int round) {
  if (pk.key_id() != sk.key_id()) {
    throw Error(ErrorCode::kKeyMismatch, "public and private key disagree");
  }
  NoiseFamily family;
  family.layout = layout;

  if (!layout.gram_anchor_ids.empty()) {
    auto p = RunFamily(pk, sk, layout.gram_anchor_ids, 16, config,
                       noise_root.Fork(kGramStream), NoiseFamilyTag::kGram, 0,
                       transcript, round);
    auto v = RunFamily(pk, sk, layout.gram_anchor_ids, 4, config,
                       noise_root.Fork(kGammaStream), NoiseFamilyTag::kGamma, 0,
                       transcript, round);
    family.gram.resize(p.size());
    family.gamma.resize(v.size());
    for (size_t k = 0; k < p.size(); ++k) {
      for (size_t e = 0; e < 16; ++e) family.gram[k][e] = std::move(p[k][e]);
      for (size_t e = 0; e < 4; ++e) family.gamma[k][e] = std::move(v[k][e]);
    }
  }

  const Rng dir_root = noise_root.Fork(kDirectionStream);
  for (int candidate : layout.direction_anchor_ids) {
    auto q = RunFamily(pk, sk, layout.direction_anchor_ids, 3, config,
                       dir_root.Fork(static_cast<uint64_t>(candidate)),
                       NoiseFamilyTag::kDirection, candidate, transcript, round);
    std::vector<DirectionMask> set(q.size());
    for (size_t k = 0; k < q.size(); ++k) {
      for (size_t e = 0; e < 3; ++e) set[k][e] = std::move(q[k][e]);
    }
    family.direction.push_back(std::move(set));
  }
  return family;
}

bool SatisfiesZeroSum(const NoiseFamily& family, const mpz_class& n) {
  auto check = [&n](const auto& sets) {
    if (sets.empty()) return true;
    const size_t width = sets[0].size();
    for (size_t e = 0; e < width; ++e) {
      mpz_class sum = 0;
      for (const auto& s : sets) sum += s[e];
      if (sum % n != 0) return false;
    }
    return true;
  };
  if (!check(family.gram) || !check(family.gamma)) return false;
  for (const auto& set : family.direction) {
    if (!check(set)) return false;
  }
  return true;
}

}  // namespace privloc
