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

#include "privloc/message.h"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "privloc/status.h"

namespace privloc {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr);
  }

  void Update(const void* data, size_t len) {
    EVP_DigestUpdate(ctx_.get(), data, len);
  }

  void UpdateTagged(uint8_t tag, int64_t v) {
    Update(&tag, 1);
    Update(&v, sizeof(v));
  }

  void UpdateBig(uint8_t tag, const mpz_class& v) {
    std::string hex = v.get_str(16);
    UpdateTagged(tag, static_cast<int64_t>(hex.size()));
    Update(hex.data(), hex.size());
  }

  std::string HexDigest() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
      s.push_back(kHex[out[i] >> 4]);
      s.push_back(kHex[out[i] & 0xf]);
    }
    return s;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string EntityId::ToString() const {
  switch (role) {
    case Role::kTarget: return "T";
    case Role::kAggregator: return "G";
    case Role::kAnchor: return "A" + std::to_string(index);
  }
  return "?";
}

const char* MessageKindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kPublicKeyDist: return "PublicKeyDist";
    case MessageKind::kEncNoise: return "EncNoise";
    case MessageKind::kEncNoiseSum: return "EncNoiseSum";
    case MessageKind::kMaskedGram: return "MaskedGram";
    case MessageKind::kMaskedGamma: return "MaskedGamma";
    case MessageKind::kEncTargetTimestamp: return "EncTargetTimestamp";
    case MessageKind::kChi: return "Chi";
    case MessageKind::kPlainTimestamp: return "PlainTimestamp";
    case MessageKind::kEVector: return "EVector";
    case MessageKind::kMaskedQ: return "MaskedQ";
    case MessageKind::kSelection: return "Selection";
  }
  return "Unknown";
}

WireFormat WireFormat::Paper(size_t key_bits) {
  return WireFormat{2 * key_bits, 24, 24, 24, key_bits};
}

WireFormat WireFormat::Strict(size_t key_bits) {
  return WireFormat{2 * key_bits, key_bits, 64, 32, key_bits};
}

uint64_t BitSize(const Payload& payload, const WireFormat& format) {
  uint64_t bits = 0;
  bits += payload.ciphertexts.size() * format.ciphertext_bits;
  bits += payload.masked.size() * format.masked_bits;
  bits += payload.plain.size() * format.plain_bits;
  bits += payload.ids.size() * format.id_bits;
  // Public key {n, g}: n has key width, g lives in Z_{n^2}.
  for (size_t i = 0; i < payload.key_material.size(); ++i) {
    bits += (i == 0 ? 1 : 2) * format.key_bits;
  }
  return bits;
}

std::string PayloadDigest(const Payload& payload) {
  Sha256 h;
  for (const auto& c : payload.ciphertexts) h.UpdateBig('c', c.value());
  for (const auto& v : payload.masked) h.UpdateBig('m', v);
  for (const auto& v : payload.plain) h.UpdateBig('p', v);
  for (int id : payload.ids) h.UpdateTagged('i', id);
  for (const auto& v : payload.key_material) h.UpdateBig('k', v);
  h.UpdateTagged('s', payload.scale_power);
  h.UpdateTagged('f', static_cast<int64_t>(payload.family));
  h.UpdateTagged('x', payload.candidate);
  return h.HexDigest();
}

}  // namespace privloc
