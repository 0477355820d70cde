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

#ifndef CONCEALHUNT_CHANNEL_H_
#define CONCEALHUNT_CHANNEL_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "concealhunt/crypto.h"

namespace concealhunt {

// Address of the coordinator in message headers.
inline constexpr const char* kCtiAddress = "cti";

// One protocol message. Parties are addressed by pseudonym.
struct Message {
  std::string phase;
  std::string step;
  std::string from;
  std::string to;
  nlohmann::json payload;
};

// Transport between simulated parties. Deliver returns what the receiver
// observes; an undeliverable message raises ProtocolAbort.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual nlohmann::json Deliver(const Message& message) = 0;
};

// Point-to-point delivery with a local log; used outside a hunt session.
class DirectChannel : public Channel {
 public:
  nlohmann::json Deliver(const Message& message) override;
  const std::vector<Message>& log() const { return log_; }

 private:
  std::vector<Message> log_;
};

nlohmann::json ToJson(const std::vector<BigInt>& values);
std::vector<BigInt> BigIntsFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Envelope& envelope);
Envelope EnvelopeFromJson(const nlohmann::json& j, const GatewayId& recipient);

}  // namespace concealhunt

#endif  // CONCEALHUNT_CHANNEL_H_
