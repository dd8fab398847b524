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

#ifndef PRIVLOC_TRANSCRIPT_H_
#define PRIVLOC_TRANSCRIPT_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "privloc/message.h"

namespace privloc {

// Ordered log of every protocol message with per-link bit accounting.
// Entities only ever see messages addressed to them (no eavesdropping), so
// View(e) is exactly entity e's adversarial knowledge beyond its own state.
class Transcript {
 public:
  struct KindTotals {
    uint64_t messages = 0;
    uint64_t ciphertexts = 0;
    uint64_t bits = 0;
  };

  explicit Transcript(WireFormat format, bool retain_payloads = true)
      : format_(format), retain_payloads_(retain_payloads) {}

  // Prices and digests `message` in place and appends it. When payloads are
  // not retained the stored copy keeps only the header fields.
  void Send(ProtocolMessage& message);

  const WireFormat& format() const { return format_; }
  bool retains_payloads() const { return retain_payloads_; }
  const std::vector<ProtocolMessage>& messages() const { return messages_; }

  uint64_t total_bits() const { return total_bits_; }
  uint64_t LinkBits(const EntityId& from, const EntityId& to) const;
  const std::map<std::pair<EntityId, EntityId>, uint64_t>& link_bits() const {
    return link_bits_;
  }
  KindTotals Totals(MessageKind kind) const;

  std::vector<const ProtocolMessage*> View(const EntityId& entity) const;

  // One JSON object per line: round, from, to, kind, bit_size, payload_digest.
  void WriteJsonLines(std::ostream& out) const;

 private:
  WireFormat format_;
  bool retain_payloads_;
  std::vector<ProtocolMessage> messages_;
  std::map<std::pair<EntityId, EntityId>, uint64_t> link_bits_;
  std::map<MessageKind, KindTotals> kind_totals_;
  uint64_t total_bits_ = 0;
};

}  // namespace privloc

#endif  // PRIVLOC_TRANSCRIPT_H_
