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

#ifndef CONCEALHUNT_CTI_H_
#define CONCEALHUNT_CTI_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "concealhunt/channel.h"
#include "concealhunt/core_model.h"
#include "concealhunt/sti_groups.h"

namespace concealhunt::cti {

enum class Phase { kInit, kStr, kSti, kPublish, kDone };
const char* PhaseName(Phase p);

struct ThreatCategorySeed {
  std::string category_id;
  std::set<Token> seed_events;  // public hypernyms
  std::string countermeasures;  // opaque payload
};

struct DeadLetter {
  Message message;
  std::string reason;
};

// The coordinator of one hunt. It is also the transport: every message
// between gateways passes through Deliver, which keeps a copy.
class HuntSession : public Channel {
 public:
  // Refuses (InvariantError) fewer than 3 participants, a repeated
  // pseudonym, or a seed event outside the taxonomy (when one is given).
  // Delivers every category to every participant.
  static HuntSession Initiate(std::span<const ThreatCategorySeed> categories,
                              std::span<const GatewayId> participants,
                              uint64_t seed,
                              const TaxonomyTree* taxonomy = nullptr);

  // Relays unmodified and records the message. An unknown recipient leaves
  // a dead letter and raises ProtocolAbort to the sender.
  nlohmann::json Deliver(const Message& message) override;

  // Phases only move forward.
  void Advance(Phase next);
  Phase phase() const { return phase_; }

  void StoreGroups(std::vector<VirtualThreatGroup> groups);
  const std::vector<VirtualThreatGroup>& stored_groups() const {
    return stored_groups_;
  }

  // Core-point catalog built from the final groups the coordinator received.
  // Requires the publish phase.
  std::vector<sti::CatalogEntry> PublishCatalog() const;

  const std::string& session_id() const { return session_id_; }
  const std::set<GatewayId>& participants() const { return participants_; }
  const std::vector<Message>& stored_transcripts() const { return transcripts_; }
  const std::vector<DeadLetter>& dead_letters() const { return dead_letters_; }
  const std::vector<ThreatCategorySeed>& categories() const {
    return categories_;
  }

  // One JSON object per stored message.
  std::string TranscriptJsonl() const;
  void WriteTranscript(const std::filesystem::path& path) const;
  nlohmann::json ExportSession() const;

 private:
  HuntSession() = default;

  std::string session_id_;
  Phase phase_ = Phase::kInit;
  std::vector<std::string> phase_history_;
  std::set<GatewayId> participants_;
  std::set<std::string> addresses_;
  std::vector<ThreatCategorySeed> categories_;
  std::vector<Message> transcripts_;
  std::vector<DeadLetter> dead_letters_;
  std::vector<VirtualThreatGroup> stored_groups_;
  std::vector<nlohmann::json> final_groups_;
};

nlohmann::json MessageToJson(const Message& m, size_t seq);
Message MessageFromJson(const nlohmann::json& j);
// Reads a transcript.jsonl export.
std::vector<Message> ReadTranscript(const std::filesystem::path& path);

}  // namespace concealhunt::cti

#endif  // CONCEALHUNT_CTI_H_
