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

#include "privloc/entities.h"

#include <algorithm>
#include <set>
#include <string>

#include "privloc/status.h"

namespace privloc {
namespace {

ProtocolMessage MakeMessage(int round, const EntityId& from, const EntityId& to,
                            MessageKind kind) {
  ProtocolMessage msg;
  msg.round = round;
  msg.from = from;
  msg.to = to;
  msg.kind = kind;
  return msg;
}

void ExpectKind(const ProtocolMessage& msg, MessageKind kind) {
  if (msg.kind != kind) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("expected ") + MessageKindName(kind) + ", got " +
                    MessageKindName(msg.kind));
  }
}

std::set<EntityId> Senders(std::span<const ProtocolMessage> msgs) {
  std::set<EntityId> out;
  for (const auto& m : msgs) {
    if (!out.insert(m.from).second) {
      throw Error(ErrorCode::kProtocolIncomplete,
                  "duplicate message from " + m.from.ToString());
    }
  }
  return out;
}

PaillierPublicKey KeyFromMessage(const ProtocolMessage& msg) {
  ExpectKind(msg, MessageKind::kPublicKeyDist);
  if (msg.payload.key_material.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "public key message needs n and g");
  }
  return PaillierPublicKey(msg.payload.key_material[0], msg.payload.key_material[1]);
}

}  // namespace

// ---- Target ---------------------------------------------------------------

TargetNode::TargetNode(PaillierKeyPair keys, int frac_bits, Rng rng)
    : keys_(std::move(keys)),
      codec_(frac_bits, keys_.public_key.n()),
      rng_(std::move(rng)) {}

ProtocolMessage TargetNode::PublicKeyMessage(int round, const EntityId& to) const {
  auto msg = MakeMessage(round, EntityId::Target(), to, MessageKind::kPublicKeyDist);
  msg.payload.key_material = {keys_.public_key.n(), keys_.public_key.g()};
  return msg;
}

void TargetNode::BeginRound(const std::map<int, double>& tau_send) {
  tau0_.clear();
  requested_.clear();
  for (const auto& [id, tau] : tau_send) tau0_[id] = codec_.Quantize(tau);
}

ProtocolMessage TargetNode::EncryptedTimestamp(int round, int anchor_id) {
  auto it = tau0_.find(anchor_id);
  if (it == tau0_.end()) {
    throw Error(ErrorCode::kProtocolIncomplete,
                "no ranging timestamp for anchor " + std::to_string(anchor_id));
  }
  auto msg = MakeMessage(round, EntityId::Target(), EntityId::Anchor(anchor_id),
                         MessageKind::kEncTargetTimestamp);
  msg.payload.scale_power = kAlphaScale;
  msg.payload.ciphertexts.push_back(
      Encrypt(keys_.public_key, codec_.EncodeInteger(it->second), rng_));
  requested_.push_back(anchor_id);
  return msg;
}

ProtocolMessage TargetNode::PlainTimestamps(int round,
                                            std::span<const int> anchor_ids) const {
  auto msg = MakeMessage(round, EntityId::Target(), EntityId::Aggregator(),
                         MessageKind::kPlainTimestamp);
  msg.payload.scale_power = kAlphaScale;
  for (int id : anchor_ids) {
    auto it = tau0_.find(id);
    if (it == tau0_.end()) {
      throw Error(ErrorCode::kProtocolIncomplete,
                  "no ranging timestamp for anchor " + std::to_string(id));
    }
    msg.payload.plain.push_back(codec_.EncodeInteger(it->second));
    msg.payload.ids.push_back(id);
  }
  return msg;
}

Position TargetNode::Finalize(std::span<const ProtocolMessage> masked_gram,
                              std::span<const ProtocolMessage> masked_gamma,
                              const ProtocolMessage& e, const GramMask& gram_mask,
                              const GammaMask& gamma_mask) {
  std::set<EntityId> expected;
  for (int id : requested_) expected.insert(EntityId::Anchor(id));
  if (Senders(masked_gram) != expected || Senders(masked_gamma) != expected) {
    throw Error(ErrorCode::kProtocolIncomplete,
                "masked terms do not cover the requested anchors");
  }
  std::vector<GramMask> grams;
  for (const auto& m : masked_gram) {
    ExpectKind(m, MessageKind::kMaskedGram);
    GramMask g;
    if (m.payload.masked.size() != 16) {
      throw Error(ErrorCode::kInvalidArgument, "masked Gram needs 16 entries");
    }
    std::copy(m.payload.masked.begin(), m.payload.masked.end(), g.begin());
    grams.push_back(std::move(g));
  }
  std::vector<GammaMask> gammas;
  for (const auto& m : masked_gamma) {
    ExpectKind(m, MessageKind::kMaskedGamma);
    GammaMask v;
    if (m.payload.masked.size() != 4) {
      throw Error(ErrorCode::kInvalidArgument, "masked Gamma needs 4 entries");
    }
    std::copy(m.payload.masked.begin(), m.payload.masked.end(), v.begin());
    gammas.push_back(std::move(v));
  }
  ExpectKind(e, MessageKind::kEVector);
  if (e.payload.ciphertexts.size() != 4) {
    throw Error(ErrorCode::kInvalidArgument, "e needs 4 ciphertexts");
  }
  CipherVec4 ev;
  std::copy(e.payload.ciphertexts.begin(), e.payload.ciphertexts.end(), ev.begin());

  gram_ = TargetRecoverGramInteger(grams, gram_mask, codec_);
  c_ = TargetRecoverCInteger(gammas, gamma_mask, codec_);
  for (int j = 0; j < 4; ++j) e_[j] = codec_.Lift(Decrypt(keys_.private_key, ev[j]));
  const LsSolution sol = TargetFinalize(gram_, c_, ev, keys_.private_key, codec_);
  estimate_ = sol.position;
  return sol.position;
}

std::vector<ProtocolMessage> TargetNode::DirectionShares(
    int round, std::span<const int> candidates,
    std::span<const DirectionMask> masks) const {
  if (!estimate_) {
    throw Error(ErrorCode::kProtocolIncomplete, "no position estimate yet");
  }
  if (candidates.size() != masks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "candidates vs direction masks");
  }
  const std::array<mpz_class, 3> p0{codec_.Quantize(estimate_->x),
                                    codec_.Quantize(estimate_->y),
                                    codec_.Quantize(estimate_->z)};
  std::vector<ProtocolMessage> out;
  for (size_t c = 0; c < candidates.size(); ++c) {
    auto msg = MakeMessage(round, EntityId::Target(), EntityId::Aggregator(),
                           MessageKind::kMaskedQ);
    msg.payload.candidate = candidates[c];
    msg.payload.scale_power = 1;
    for (int k = 0; k < 3; ++k) {
      mpz_class v = (masks[c][k] + codec_.EncodeInteger(p0[k])) % codec_.modulus();
      msg.payload.masked.push_back(std::move(v));
    }
    out.push_back(std::move(msg));
  }
  return out;
}

void TargetNode::ReceiveSelection(const ProtocolMessage& selection) {
  ExpectKind(selection, MessageKind::kSelection);
  selection_ = selection.payload.ids;
}

// ---- Anchor ---------------------------------------------------------------

AnchorNode::AnchorNode(int id, int frac_bits, Rng rng)
    : id_(id), frac_bits_(frac_bits), rng_(std::move(rng)) {}

void AnchorNode::ReceivePublicKey(const ProtocolMessage& msg) {
  pk_ = KeyFromMessage(msg);
  codec_.emplace(frac_bits_, pk_->n());
}

const PaillierPublicKey& AnchorNode::pk() const {
  if (!pk_) throw Error(ErrorCode::kProtocolIncomplete, "anchor has no public key");
  return *pk_;
}

void AnchorNode::BeginRound(const Position& position, double tau_recv) {
  pk();
  q_ = QuantizeAnchor(position, tau_recv, *codec_);
}

ProtocolMessage AnchorNode::MaskedGram(int round, const GramMask& mask) const {
  auto msg = MakeMessage(round, entity(), EntityId::Target(), MessageKind::kMaskedGram);
  msg.payload.scale_power = kGramScale;
  msg.payload.family = NoiseFamilyTag::kGram;
  const GramMask masked = AnchorMaskedGram(q_.alpha, mask, *codec_);
  msg.payload.masked.assign(masked.begin(), masked.end());
  return msg;
}

ProtocolMessage AnchorNode::MaskedGamma(int round, const GammaMask& mask) const {
  auto msg = MakeMessage(round, entity(), EntityId::Target(), MessageKind::kMaskedGamma);
  msg.payload.scale_power = kGammaScale;
  msg.payload.family = NoiseFamilyTag::kGamma;
  const GammaMask masked = AnchorMaskedGamma(q_.alpha, q_.gamma, mask, *codec_);
  msg.payload.masked.assign(masked.begin(), masked.end());
  return msg;
}

ProtocolMessage AnchorNode::Chi(int round, const ProtocolMessage& encrypted_timestamp) {
  ExpectKind(encrypted_timestamp, MessageKind::kEncTargetTimestamp);
  if (encrypted_timestamp.to != entity() ||
      encrypted_timestamp.payload.ciphertexts.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "malformed timestamp message");
  }
  const ChiOutput out = AnchorComputeChi(
      q_.alpha, encrypted_timestamp.payload.ciphertexts[0], q_.tau, pk(), *codec_, rng_);
  auto msg = MakeMessage(round, entity(), EntityId::Aggregator(), MessageKind::kChi);
  msg.payload.scale_power = kChiScale;
  msg.payload.ciphertexts.assign(out.chi.begin(), out.chi.end());
  return msg;
}

std::vector<ProtocolMessage> AnchorNode::DirectionShares(
    int round, std::span<const int> candidates,
    std::span<const DirectionMask> masks) const {
  if (candidates.size() != masks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "candidates vs direction masks");
  }
  const std::array<mpz_class, 3> own{q_.x, q_.y, q_.z};
  std::vector<ProtocolMessage> out;
  for (size_t c = 0; c < candidates.size(); ++c) {
    auto msg = MakeMessage(round, entity(), EntityId::Aggregator(), MessageKind::kMaskedQ);
    msg.payload.candidate = candidates[c];
    msg.payload.scale_power = 1;
    for (int k = 0; k < 3; ++k) {
      mpz_class v = masks[c][k];
      if (candidates[c] == id_) {
        v = (v + codec_->EncodeInteger(-own[k])) % codec_->modulus();
      }
      msg.payload.masked.push_back(std::move(v));
    }
    out.push_back(std::move(msg));
  }
  return out;
}

// ---- Aggregator -----------------------------------------------------------

void AggregatorNode::ReceivePublicKey(const ProtocolMessage& msg) {
  pk_ = KeyFromMessage(msg);
  codec_.emplace(frac_bits_, pk_->n());
}

const PaillierPublicKey& AggregatorNode::pk() const {
  if (!pk_) throw Error(ErrorCode::kProtocolIncomplete, "aggregator has no public key");
  return *pk_;
}

ProtocolMessage AggregatorNode::ComputeE(int round,
                                         std::span<const ProtocolMessage> chis,
                                         const ProtocolMessage& plain_timestamps) const {
  ExpectKind(plain_timestamps, MessageKind::kPlainTimestamp);
  const auto& ids = plain_timestamps.payload.ids;
  const auto& taus = plain_timestamps.payload.plain;
  if (ids.size() != taus.size()) {
    throw Error(ErrorCode::kInvalidArgument, "timestamp ids vs values");
  }
  std::map<int, CipherVec4> by_anchor;
  for (const auto& m : chis) {
    ExpectKind(m, MessageKind::kChi);
    if (!m.from.is_anchor() || m.payload.ciphertexts.size() != 4) {
      throw Error(ErrorCode::kInvalidArgument, "malformed chi message");
    }
    CipherVec4 v;
    std::copy(m.payload.ciphertexts.begin(), m.payload.ciphertexts.end(), v.begin());
    if (!by_anchor.emplace(m.from.index, std::move(v)).second) {
      throw Error(ErrorCode::kProtocolIncomplete, "duplicate chi from " + m.from.ToString());
    }
  }
  if (by_anchor.size() != ids.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(by_anchor.size()) + " chi vectors vs " +
                    std::to_string(ids.size()) + " timestamps");
  }
  std::vector<CipherVec4> ordered;
  for (int id : ids) {
    auto it = by_anchor.find(id);
    if (it == by_anchor.end()) {
      throw Error(ErrorCode::kProtocolIncomplete,
                  "missing chi from anchor " + std::to_string(id));
    }
    ordered.push_back(it->second);
  }
  const CipherVec4 e = AggregatorComputeE(pk(), ordered, taus);
  auto msg = MakeMessage(round, EntityId::Aggregator(), EntityId::Target(),
                         MessageKind::kEVector);
  msg.payload.scale_power = kEScale;
  msg.payload.ciphertexts.assign(e.begin(), e.end());
  return msg;
}

ProtocolMessage AggregatorNode::Select(int round,
                                       std::span<const ProtocolMessage> masked_q,
                                       std::span<const int> candidates, size_t n,
                                       SelectionResult* result) {
  pk();
  std::map<int, std::vector<MaskedDirection>> by_candidate;
  for (const auto& m : masked_q) {
    ExpectKind(m, MessageKind::kMaskedQ);
    if (m.payload.masked.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument, "masked direction needs 3 entries");
    }
    MaskedDirection d;
    d.sender = m.from;
    std::copy(m.payload.masked.begin(), m.payload.masked.end(), d.values.begin());
    by_candidate[m.payload.candidate].push_back(std::move(d));
  }
  directions_.clear();
  Eigen::Matrix<double, Eigen::Dynamic, 3> rows(candidates.size(), 3);
  for (size_t c = 0; c < candidates.size(); ++c) {
    const Eigen::Vector3d h = ReconstructDirection(by_candidate[candidates[c]],
                                                   candidates[c], candidates, *codec_);
    directions_[candidates[c]] = h;
    rows.row(static_cast<Eigen::Index>(c)) = h.transpose();
  }
  const ObservationMatrix obs(std::move(rows),
                              std::vector<int>(candidates.begin(), candidates.end()));
  SelectionResult selection = NsaGreedy(obs, n);
  auto msg = MakeMessage(round, EntityId::Aggregator(), EntityId::Target(),
                         MessageKind::kSelection);
  msg.payload.ids = selection.selected;
  if (result != nullptr) *result = std::move(selection);
  return msg;
}

}  // namespace privloc
