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

#ifndef CONCEALHUNT_ATTACK_H_
#define CONCEALHUNT_ATTACK_H_

#include <set>
#include <span>
#include <string>

#include "json.hpp"

#include "concealhunt/channel.h"
#include "concealhunt/core_model.h"

namespace concealhunt::harness {

struct AttackReport {
  size_t messages = 0;
  size_t digests_seen = 0;          // hex strings shaped like a token hash
  std::set<Token> recovered;        // confirmed from transcript content
  std::set<Token> leaked;           // disclosed on purpose; flagged recovered
  std::set<Token> inferred;         // unconfirmed co-membership guesses
  std::set<Token> hypernyms_recovered;
  std::set<Token> suppressed_recovered;  // sensitive, never leaked
};

// Dictionary attack by a semi-honest coordinator: every taxonomy token is
// hashed (full digest and 64-bit identifier) and matched against the
// transcript, plain labels included. Siblings of leaked tokens under a
// recovered hypernym are listed as guesses. sensitive is only used to score
// the outcome.
AttackReport LeakageAttack(std::span<const Message> transcripts,
                           const TaxonomyTree& vocabulary,
                           const std::set<Token>& leaked,
                           const std::set<Token>& sensitive);

nlohmann::json AttackToJson(const AttackReport& report);

}  // namespace concealhunt::harness

#endif  // CONCEALHUNT_ATTACK_H_
