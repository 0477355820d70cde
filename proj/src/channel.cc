/*
 * Copyright 2026 The concealhunt Authors.
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

#include "concealhunt/channel.h"

#include "concealhunt/error.h"

namespace concealhunt {

using nlohmann::json;

json DirectChannel::Deliver(const Message& message) {
  log_.push_back(message);
  return message.payload;
}

json ToJson(const std::vector<BigInt>& values) {
  json arr = json::array();
  for (const BigInt& v : values) arr.push_back(BigHex(v));
  return arr;
}

std::vector<BigInt> BigIntsFromJson(const json& j) {
  if (!j.is_array()) throw ProtocolAbort("expected an array of integers");
  std::vector<BigInt> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(BigFromHex(v.get<std::string>()));
  return out;
}

json ToJson(const Envelope& envelope) {
  return json{{"recipient", envelope.recipient.pseudonym},
              {"ciphertext", ToHex(envelope.ciphertext)}};
}

Envelope EnvelopeFromJson(const json& j, const GatewayId& recipient) {
  if (j.at("recipient").get<std::string>() != recipient.pseudonym) {
    throw ProtocolAbort("envelope addressed to another party");
  }
  return Envelope{recipient, FromHex(j.at("ciphertext").get<std::string>())};
}

}  // namespace concealhunt
