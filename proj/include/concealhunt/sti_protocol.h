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

#ifndef CONCEALHUNT_STI_PROTOCOL_H_
#define CONCEALHUNT_STI_PROTOCOL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "concealhunt/channel.h"
#include "concealhunt/sti_groups.h"
#include "concealhunt/sti_ring.h"

// Second-stage concealment, run independently inside every virtual group:
// private frequent-event mining over a commutative-cipher ring, real group
// initialization and assignment, hierarchy construction and merging.
namespace concealhunt::sti {

struct Member {
  GatewayId id;
  SanitizedLog log;
  BoxKeypair box;
};

struct Params {
  MiningParams mining;
  MergeParams merge;
  unsigned group_bits = 512;
  LogBase base = LogBase::kE;
};

struct VcOutcome {
  VirtualThreatGroup vc;  // final groups filled in
  Forest forest;
  GlobalCatalog catalog;
  std::vector<RealThreatGroup> initial_groups;  // before assignment
  std::map<std::string, std::string> parents;   // group id -> parent id
  size_t candidate_count = 0;
  size_t merges = 0;
  bool fallback = false;  // catalog was empty
};

// members must hold every member of vc (extra entries are ignored); stats is
// the public corpus aggregate used for the event weights.
VcOutcome RunVirtualGroup(const VirtualThreatGroup& vc,
                          std::span<const Member> members,
                          const CorpusStats& stats, const Vocabulary& vocab,
                          const Params& params, uint64_t seed,
                          Channel& channel);

std::vector<VcOutcome> Run(std::span<const VirtualThreatGroup> vcs,
                           std::span<const Member> members,
                           const CorpusStats& stats, const Vocabulary& vocab,
                           const Params& params, uint64_t seed,
                           Channel& channel);

// Public form of a final group as reported to the coordinator. rc_support is
// restricted to the defining events.
nlohmann::json GroupToJson(const RealThreatGroup& g, const std::string& parent,
                           const SupportMap& rc_support = {});

}  // namespace concealhunt::sti

#endif  // CONCEALHUNT_STI_PROTOCOL_H_
