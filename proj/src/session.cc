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

#include <time.h>

#include <string>

#include "privloc/status.h"

namespace privloc {
namespace {

double ThreadCpuMs() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) * 1e3 + static_cast<double>(ts.tv_nsec) * 1e-6;
}

// Protocol streams under the session seed.
constexpr uint64_t kKeyStream = 0;
constexpr uint64_t kTargetStream = 1;
constexpr uint64_t kAnchorStream = 2;

std::vector<AnchorNode> MakeAnchors(size_t count, int frac_bits, const Rng& root) {
  std::vector<AnchorNode> out;
  out.reserve(count);
  const Rng anchor_root = root.Fork(kAnchorStream);
  for (size_t k = 0; k < count; ++k) {
    const int id = static_cast<int>(k) + 1;
    out.emplace_back(id, frac_bits, anchor_root.Fork(static_cast<uint64_t>(id)));
  }
  return out;
}

}  // namespace

std::map<MessageKind, uint64_t> ExpectedMessageCounts(size_t localization_anchors,
                                                      size_t total_anchors,
                                                      bool selection_runs,
                                                      bool distributes_keys) {
  const uint64_t l = localization_anchors;
  const uint64_t m = selection_runs ? total_anchors : 0;
  return {
      {MessageKind::kPublicKeyDist, distributes_keys ? total_anchors + 1 : 0},
      {MessageKind::kEncNoise, 2 * l + m * m},
      {MessageKind::kEncNoiseSum, 2 + m},
      {MessageKind::kMaskedGram, l},
      {MessageKind::kMaskedGamma, l},
      {MessageKind::kEncTargetTimestamp, l},
      {MessageKind::kChi, l},
      {MessageKind::kPlainTimestamp, 1},
      {MessageKind::kEVector, 1},
      {MessageKind::kMaskedQ, m * (m + 1)},
      {MessageKind::kSelection, selection_runs ? 1u : 0u},
  };
}

PrivateLocalizationSession::PrivateLocalizationSession(const ProtocolConfig& config,
                                                       size_t anchor_count,
                                                       uint64_t seed,
                                                       uint64_t noise_seed,
                                                       Transcript* transcript)
    : PrivateLocalizationSession(config, anchor_count, [&] {
        Rng key_rng = Rng(seed).Fork(kKeyStream);
        return GenerateKeyPair(config.key_bits, key_rng);
      }(), seed, noise_seed, transcript) {}

PrivateLocalizationSession::PrivateLocalizationSession(const ProtocolConfig& config,
                                                       size_t anchor_count,
                                                       PaillierKeyPair keys,
                                                       uint64_t seed,
                                                       uint64_t noise_seed,
                                                       Transcript* transcript)
    : config_(config),
      anchor_count_(anchor_count),
      noise_root_(noise_seed),
      transcript_(transcript),
      target_(std::move(keys), config.frac_bits, Rng(seed).Fork(kTargetStream)),
      anchors_(MakeAnchors(anchor_count, config.frac_bits, Rng(seed))),
      aggregator_(config.frac_bits) {
  if (transcript_ == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "session needs a transcript");
  }
  if (anchor_count_ < 4) {
    throw Error(ErrorCode::kUnderdetermined, "need at least 4 anchors");
  }
  if (config_.selection_n && *config_.selection_n < 4) {
    throw Error(ErrorCode::kConfig, "selection size must be at least 4");
  }
}

void PrivateLocalizationSession::Send(ProtocolMessage& msg) { transcript_->Send(msg); }

void PrivateLocalizationSession::DistributeKeys(int round) {
  for (auto& anchor : anchors_) {
    ProtocolMessage msg = target_.PublicKeyMessage(round, anchor.entity());
    Send(msg);
    anchor.ReceivePublicKey(msg);
  }
  ProtocolMessage msg = target_.PublicKeyMessage(round, EntityId::Aggregator());
  Send(msg);
  aggregator_.ReceivePublicKey(msg);
  keys_distributed_ = true;
}

RoundOutput PrivateLocalizationSession::RunRound(
    const RoundInputs& inputs, const std::vector<int>& previous_selection) {
  const int round = inputs.round;
  try {
    if (inputs.anchors.size() != anchor_count_ ||
        inputs.observations.size() != anchor_count_) {
      throw Error(ErrorCode::kDimensionMismatch, "round inputs do not match anchor count");
    }
    RoundOutput out;
    std::vector<int> used = previous_selection;
    if (used.empty()) {
      for (size_t k = 0; k < anchor_count_; ++k) used.push_back(static_cast<int>(k) + 1);
    }
    for (int id : used) {
      if (id < 1 || static_cast<size_t>(id) > anchor_count_) {
        throw Error(ErrorCode::kInvalidArgument, "unknown anchor id " + std::to_string(id));
      }
    }
    if (used.size() < 4) {
      throw Error(ErrorCode::kUnderdetermined, "fewer than 4 anchors selected");
    }
    const bool selects = config_.selection_n && anchor_count_ > *config_.selection_n;
    std::vector<int> all_ids;
    for (size_t k = 0; k < anchor_count_; ++k) all_ids.push_back(static_cast<int>(k) + 1);

    if (!keys_distributed_) DistributeKeys(round);

    // Zero-sum noise for every family used this round.
    double t0 = ThreadCpuMs();
    FamilyLayout layout;
    layout.gram_anchor_ids = used;
    if (selects) layout.direction_anchor_ids = all_ids;
    noise_ = ExpandNoiseFamily(target_.public_key(), target_.private_key(), layout,
                               config_.noise,
                               noise_root_.Fork(static_cast<uint64_t>(round)),
                               transcript_, round);
    out.times.zsng_ms = ThreadCpuMs() - t0;

    // Local measurements.
    t0 = ThreadCpuMs();
    std::map<int, double> tau_send;
    for (size_t k = 0; k < anchor_count_; ++k) {
      const auto& obs = inputs.observations[k];
      if (obs.anchor_id != static_cast<int>(k) + 1) {
        throw Error(ErrorCode::kInvalidArgument, "observations out of anchor order");
      }
      tau_send[obs.anchor_id] = obs.tau_send;
      anchors_[k].BeginRound(inputs.anchors[k], obs.tau_recv);
    }
    target_.BeginRound(tau_send);

    // Masked Gram and Gamma terms.
    std::vector<ProtocolMessage> grams, gammas, chis;
    for (size_t k = 0; k < used.size(); ++k) {
      AnchorNode& anchor = anchors_[used[k] - 1];
      grams.push_back(anchor.MaskedGram(round, noise_.gram[k + 1]));
      Send(grams.back());
      gammas.push_back(anchor.MaskedGamma(round, noise_.gamma[k + 1]));
      Send(gammas.back());
    }
    // Homomorphic e path.
    for (int id : used) {
      ProtocolMessage t0i = target_.EncryptedTimestamp(round, id);
      Send(t0i);
      chis.push_back(anchors_[id - 1].Chi(round, t0i));
      Send(chis.back());
    }
    ProtocolMessage plain = target_.PlainTimestamps(round, used);
    Send(plain);
    ProtocolMessage e = aggregator_.ComputeE(round, chis, plain);
    Send(e);
    out.estimate = target_.Finalize(grams, gammas, e, noise_.gram[0], noise_.gamma[0]);
    out.times.loc_ms = ThreadCpuMs() - t0;
    out.recovered_gram = target_.recovered_gram();
    out.recovered_c = target_.recovered_c();
    out.recovered_e = target_.recovered_e();
    out.used_anchors = used;

    // Selection for the next round.
    if (selects) {
      t0 = ThreadCpuMs();
      std::vector<DirectionMask> target_masks;
      for (const auto& set : noise_.direction) target_masks.push_back(set[0]);
      std::vector<ProtocolMessage> shares =
          target_.DirectionShares(round, all_ids, target_masks);
      for (size_t k = 0; k < anchor_count_; ++k) {
        std::vector<DirectionMask> masks;
        for (const auto& set : noise_.direction) masks.push_back(set[k + 1]);
        auto own = anchors_[k].DirectionShares(round, all_ids, masks);
        for (auto& m : own) shares.push_back(std::move(m));
      }
      for (auto& m : shares) Send(m);
      SelectionResult result;
      ProtocolMessage sel = aggregator_.Select(round, shares, all_ids,
                                               *config_.selection_n, &result);
      Send(sel);
      target_.ReceiveSelection(sel);
      out.next_selection = target_.selection();
      out.selection = std::move(result);
      out.times.nsa_ms = ThreadCpuMs() - t0;
    } else {
      out.next_selection = all_ids;
    }

    const SignedFixedCodec& codec = target_.codec();
    for (const auto& anchor : anchors_) {
      const QuantizedAnchor& q = anchor.quantized();
      auto& s = out.secrets[anchor.entity()];
      for (const mpz_class* v : {&q.x, &q.y, &q.z, &q.tau}) {
        s.push_back(codec.EncodeInteger(*v));
        s.push_back(codec.EncodeInteger(-2 * *v));
      }
    }
    auto& ts = out.secrets[EntityId::Target()];
    for (double v : {out.estimate.x, out.estimate.y, out.estimate.z}) {
      ts.push_back(codec.Encode(v));
    }
    return out;
  } catch (const GeometryError& err) {
    throw GeometryError("round " + std::to_string(round) + ": " + err.detail(),
                        err.condition());
  } catch (const Error& err) {
    throw Error(err.code(), "round " + std::to_string(round) + ": " + err.detail());
  }
}

}  // namespace privloc
