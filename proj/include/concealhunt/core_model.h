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

#ifndef CONCEALHUNT_CORE_MODEL_H_
#define CONCEALHUNT_CORE_MODEL_H_

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "concealhunt/rng.h"

namespace concealhunt {

// An event token (a vocabulary item). Set operations across the library use
// the token alone; timestamps and attributes never take part in identity.
using Token = std::string;

struct GatewayId {
  std::string pseudonym;
  uint32_t index = 0;

  friend auto operator<=>(const GatewayId&, const GatewayId&) = default;
};

// 128-bit hex pseudonym drawn from the run generator.
std::string NewPseudonym(Rng& rng);

struct Event {
  Token event_id;
  std::string device_id;
  int64_t timestamp = 0;
  std::map<std::string, std::string> attrs;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventLog {
  GatewayId gateway;
  std::vector<Event> records;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

struct SanitizedLog {
  GatewayId gateway;
  std::vector<Event> records;
  uint64_t suppressed_count = 0;

  friend bool operator==(const SanitizedLog&, const SanitizedLog&) = default;
};

// Rooted tree of event tokens. The root is its own parent in the file format
// and has depth 0.
class TaxonomyTree {
 public:
  TaxonomyTree() = default;

  // Builds from (child, parent) pairs; exactly one pair must be (root, root).
  // Throws InvariantError on cycles, multiple parents, or a missing root.
  static TaxonomyTree FromPairs(
      const std::vector<std::pair<Token, Token>>& pairs);

  const Token& root() const { return root_; }
  bool Contains(const Token& t) const { return parent_.count(t) > 0; }
  const std::map<Token, Token>& parents() const { return parent_; }
  std::vector<Token> Nodes() const;
  const Token& Parent(const Token& t) const;
  int Depth(const Token& t) const;
  // Token first, root last.
  std::vector<Token> PathToRoot(const Token& t) const;
  std::vector<Token> Children(const Token& t) const;
  // Nodes at exactly the given depth.
  std::vector<Token> AtDepth(int depth) const;

  friend bool operator==(const TaxonomyTree& a, const TaxonomyTree& b) {
    return a.root_ == b.root_ && a.parent_ == b.parent_;
  }

 private:
  Token root_;
  std::map<Token, Token> parent_;
  std::map<Token, int> depth_;
};

struct EventVector {
  GatewayId owner;
  std::map<Token, double> weights;  // nonzero entries only
  uint64_t dimension = 0;           // distinct tokens in the source log

  std::set<Token> Support() const;
  friend bool operator==(const EventVector&, const EventVector&) = default;
};

struct RealThreatGroup {
  std::set<Token> events;        // I_sg
  std::set<GatewayId> members;   // V_sg
  Token core_point;              // d_sg
  uint32_t level = 0;            // count of defining frequent events

  // Canonical identifier: digest over the sorted defining events.
  std::string Id() const;
  friend bool operator==(const RealThreatGroup&,
                         const RealThreatGroup&) = default;
};

struct VirtualThreatGroup {
  std::vector<RealThreatGroup> groups;
  std::set<GatewayId> members;
  GatewayId trusted_node;

  friend bool operator==(const VirtualThreatGroup&,
                         const VirtualThreatGroup&) = default;
};

// Invariant checks; each throws InvariantError naming the violation.
void Validate(const Event& e);
void Validate(const EventLog& log);
void Validate(const SanitizedLog& log);
void Validate(const EventVector& v);
void Validate(const RealThreatGroup& g);
void Validate(const VirtualThreatGroup& vc);

// Pairwise disjoint V_sg and pairwise distinct I_sg across the groups.
bool SatisfiesDisjointness(const VirtualThreatGroup& vc);

// Tokens of a log as a set; records only contribute their event_id.
std::set<Token> TokenSet(const std::vector<Event>& records);
std::map<Token, uint64_t> TokenCounts(const std::vector<Event>& records);

}  // namespace concealhunt

#endif  // CONCEALHUNT_CORE_MODEL_H_
