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

#include "concealhunt/cti.h"

#include <fstream>
#include <map>
#include <sstream>

#include "concealhunt/crypto.h"
#include "concealhunt/error.h"

namespace concealhunt::cti {

using nlohmann::json;

const char* PhaseName(Phase p) {
  switch (p) {
    case Phase::kInit:
      return "init";
    case Phase::kStr:
      return "str";
    case Phase::kSti:
      return "sti";
    case Phase::kPublish:
      return "publish";
    case Phase::kDone:
      return "done";
  }
  return "?";
}

HuntSession HuntSession::Initiate(std::span<const ThreatCategorySeed> categories,
                                  std::span<const GatewayId> participants,
                                  uint64_t seed, const TaxonomyTree* taxonomy) {
  if (participants.size() < 3) {
    throw InvariantError("hunt refused: at least 3 participants required");
  }
  HuntSession s;
  for (const GatewayId& id : participants) {
    if (!s.addresses_.insert(id.pseudonym).second) {
      throw InvariantError("hunt refused: duplicate pseudonym " + id.pseudonym);
    }
    s.participants_.insert(id);
  }
  if (s.addresses_.count(kCtiAddress)) {
    throw InvariantError("hunt refused: reserved pseudonym");
  }
  for (const ThreatCategorySeed& c : categories) {
    if (taxonomy) {
      for (const Token& t : c.seed_events) {
        if (!taxonomy->Contains(t)) {
          throw InvariantError("category " + c.category_id +
                               ": seed event outside the taxonomy");
        }
      }
    }
    s.categories_.push_back(c);
  }
  Rng rng = Rng::Derive(seed, "cti/session");
  s.session_id_ = ToHex(rng.Bytes(8));
  s.phase_history_.push_back(PhaseName(Phase::kInit));

  for (const GatewayId& id : participants) {
    for (const ThreatCategorySeed& c : s.categories_) {
      s.transcripts_.push_back({"init", "init.seed", kCtiAddress, id.pseudonym,
                                {{"category_id", c.category_id},
                                 {"seed_events", c.seed_events},
                                 {"countermeasures", c.countermeasures}}});
    }
  }
  return s;
}

json HuntSession::Deliver(const Message& message) {
  if (phase_ == Phase::kDone) {
    throw InvariantError("relay on a finished session");
  }
  const bool known_from =
      message.from == kCtiAddress || addresses_.count(message.from);
  const bool known_to = message.to == kCtiAddress || addresses_.count(message.to);
  if (!known_from || !known_to) {
    dead_letters_.push_back(
        {message, known_to ? "unknown sender" : "unknown recipient"});
    throw ProtocolAbort("undeliverable message " + message.step + " to '" +
                        message.to + "'");
  }
  transcripts_.push_back(message);
  if (message.to == kCtiAddress && message.step == "sti.final_groups") {
    final_groups_.push_back(message.payload);
  }
  return message.payload;
}

void HuntSession::Advance(Phase next) {
  if (static_cast<int>(next) <= static_cast<int>(phase_)) {
    throw InvariantError(std::string("phase cannot move from ") +
                         PhaseName(phase_) + " to " + PhaseName(next));
  }
  phase_ = next;
  phase_history_.push_back(PhaseName(next));
}

void HuntSession::StoreGroups(std::vector<VirtualThreatGroup> groups) {
  stored_groups_ = std::move(groups);
}

std::vector<sti::CatalogEntry> HuntSession::PublishCatalog() const {
  if (phase_ != Phase::kPublish) {
    throw InvariantError("catalog requested before the publish phase");
  }
  std::vector<sti::CatalogEntry> out;
  for (const json& vc : final_groups_) {
    for (const json& g : vc.at("groups")) {
      sti::CatalogEntry e;
      e.group_id = g.at("id").get<std::string>();
      std::map<std::string, Token> by_digest;
      for (const json& ev : g.at("events")) {
        const Token label = ev.at("label").get<Token>();
        e.events.insert(label);
        by_digest[ev.at("digest").get<std::string>()] = label;
      }
      e.core_point = g.at("core_point").at("label").get<Token>();
      e.level = g.at("level").get<uint32_t>();
      for (const auto& [digest, v] : g.at("rc_support").items()) {
        auto it = by_digest.find(digest);
        if (it != by_digest.end()) e.rc_support[it->second] = v.get<double>();
      }
      size_t best_overlap = 0;
      for (const ThreatCategorySeed& c : categories_) {
        size_t overlap = 0;
        for (const Token& t : c.seed_events) overlap += e.events.count(t);
        if (overlap > best_overlap) {
          best_overlap = overlap;
          e.countermeasures = c.countermeasures;
        }
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

json MessageToJson(const Message& m, size_t seq) {
  return {{"seq", seq},     {"phase", m.phase}, {"step", m.step},
          {"from", m.from}, {"to", m.to},       {"payload", m.payload}};
}

Message MessageFromJson(const json& j) {
  return {j.at("phase").get<std::string>(), j.at("step").get<std::string>(),
          j.at("from").get<std::string>(), j.at("to").get<std::string>(),
          j.at("payload")};
}

std::string HuntSession::TranscriptJsonl() const {
  std::string out;
  for (size_t i = 0; i < transcripts_.size(); ++i) {
    out += MessageToJson(transcripts_[i], i).dump();
    out += '\n';
  }
  return out;
}

void HuntSession::WriteTranscript(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << TranscriptJsonl();
}

json HuntSession::ExportSession() const {
  json participants = json::array();
  for (const GatewayId& id : participants_) participants.push_back(id.pseudonym);
  json groups = json::array();
  for (const VirtualThreatGroup& vc : stored_groups_) {
    json real = json::array();
    for (const RealThreatGroup& g : vc.groups) {
      real.push_back({{"id", g.Id()},
                      {"level", g.level},
                      {"members", g.members.size()},
                      {"core_point", TokenDigestHex(g.core_point)}});
    }
    groups.push_back({{"trusted_node", vc.trusted_node.pseudonym},
                      {"members", vc.members.size()},
                      {"real_groups", real}});
  }
  json dead = json::array();
  for (const DeadLetter& d : dead_letters_) {
    dead.push_back({{"step", d.message.step},
                    {"from", d.message.from},
                    {"to", d.message.to},
                    {"reason", d.reason}});
  }
  return {{"session_id", session_id_},
          {"phase", PhaseName(phase_)},
          {"phases", phase_history_},
          {"participants", participants},
          {"categories", categories_.size()},
          {"messages", transcripts_.size()},
          {"dead_letters", dead},
          {"groups", groups}};
}

std::vector<Message> ReadTranscript(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path.string());
  std::vector<Message> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(MessageFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error("malformed transcript line: " + std::string(e.what()));
    }
  }
  return out;
}

}  // namespace concealhunt::cti
