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

#ifndef PRIVLOC_MESSAGE_H_
#define PRIVLOC_MESSAGE_H_

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "privloc/paillier.h"

namespace privloc {

enum class Role { kTarget = 0, kAnchor = 1, kAggregator = 2 };

// Target is T, anchors are A1..Am (1-based, matching anchor ids), the
// aggregator is G.
struct EntityId {
  Role role = Role::kTarget;
  int index = 0;

  static EntityId Target() { return {Role::kTarget, 0}; }
  static EntityId Anchor(int id) { return {Role::kAnchor, id}; }
  static EntityId Aggregator() { return {Role::kAggregator, 0}; }

  bool is_anchor() const { return role == Role::kAnchor; }
  std::string ToString() const;

  friend auto operator<=>(const EntityId&, const EntityId&) = default;
};

enum class MessageKind {
  kPublicKeyDist,
  kEncNoise,
  kEncNoiseSum,
  kMaskedGram,
  kMaskedGamma,
  kEncTargetTimestamp,
  kChi,
  kPlainTimestamp,
  kEVector,
  kMaskedQ,
  kSelection,
};

const char* MessageKindName(MessageKind kind);

// Which noise family a ZSNG exchange belongs to.
enum class NoiseFamilyTag { kNone = 0, kGram = 1, kGamma = 2, kDirection = 3 };

// Message body. Fields are grouped by how they are priced on the wire:
// ciphertexts at the ciphertext width, masked residues at the masked width,
// plain integers at the plaintext width, ids at the id width, and key
// material at its exact width.
struct Payload {
  std::vector<Ciphertext> ciphertexts;
  std::vector<mpz_class> masked;
  std::vector<mpz_class> plain;
  std::vector<int> ids;
  std::vector<mpz_class> key_material;
  // Fixed-point scale power of masked/plain values (0 when not applicable).
  int scale_power = 0;
  NoiseFamilyTag family = NoiseFamilyTag::kNone;
  // Candidate anchor for direction-family and MaskedQ messages.
  int candidate = 0;
};

struct ProtocolMessage {
  int round = 0;
  EntityId from;
  EntityId to;
  MessageKind kind = MessageKind::kPublicKeyDist;
  Payload payload;
  uint64_t bit_size = 0;
  // Hex digest of the payload, filled in when recorded.
  std::string payload_digest;
};

// Per-element wire widths.
struct WireFormat {
  size_t ciphertext_bits = 1024;
  size_t masked_bits = 24;
  size_t plain_bits = 24;
  size_t id_bits = 24;
  size_t key_bits = 512;

  // Table-driven widths: every plaintext or masked value costs 24 bits.
  static WireFormat Paper(size_t key_bits);
  // Masked values at modulus width, plaintext integers as 64-bit words.
  static WireFormat Strict(size_t key_bits);
};

uint64_t BitSize(const Payload& payload, const WireFormat& format);

// SHA-256 over a canonical byte serialization of the payload, hex encoded.
std::string PayloadDigest(const Payload& payload);

}  // namespace privloc

#endif  // PRIVLOC_MESSAGE_H_
