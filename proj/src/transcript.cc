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

#include "privloc/transcript.h"

#include <nlohmann/json.hpp>

namespace privloc {

void Transcript::Send(ProtocolMessage& message) {
  message.bit_size = BitSize(message.payload, format_);
  message.payload_digest = PayloadDigest(message.payload);
  link_bits_[{message.from, message.to}] += message.bit_size;
  auto& totals = kind_totals_[message.kind];
  totals.messages += 1;
  totals.ciphertexts += message.payload.ciphertexts.size();
  totals.bits += message.bit_size;
  total_bits_ += message.bit_size;
  if (retain_payloads_) {
    messages_.push_back(message);
  } else {
    ProtocolMessage header;
    header.round = message.round;
    header.from = message.from;
    header.to = message.to;
    header.kind = message.kind;
    header.bit_size = message.bit_size;
    header.payload_digest = message.payload_digest;
    messages_.push_back(std::move(header));
  }
}

uint64_t Transcript::LinkBits(const EntityId& from, const EntityId& to) const {
  auto it = link_bits_.find({from, to});
  return it == link_bits_.end() ? 0 : it->second;
}

Transcript::KindTotals Transcript::Totals(MessageKind kind) const {
  auto it = kind_totals_.find(kind);
  return it == kind_totals_.end() ? KindTotals{} : it->second;
}

std::vector<const ProtocolMessage*> Transcript::View(const EntityId& entity) const {
  std::vector<const ProtocolMessage*> view;
  for (const auto& m : messages_) {
    if (m.to == entity) view.push_back(&m);
  }
  return view;
}

void Transcript::WriteJsonLines(std::ostream& out) const {
  for (const auto& m : messages_) {
    nlohmann::ordered_json j;
    j["round"] = m.round;
    j["from"] = m.from.ToString();
    j["to"] = m.to.ToString();
    j["kind"] = MessageKindName(m.kind);
    j["bit_size"] = m.bit_size;
    j["payload_digest"] = m.payload_digest;
    out << j.dump() << '\n';
  }
}

}  // namespace privloc
