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

#include "concealhunt/core_model.h"

#include <algorithm>

#include "concealhunt/canonical.h"
#include "concealhunt/crypto.h"
#include "concealhunt/error.h"

namespace concealhunt {

std::string NewPseudonym(Rng& rng) { return ToHex(rng.Bytes(16)); }

TaxonomyTree TaxonomyTree::FromPairs(
    const std::vector<std::pair<Token, Token>>& pairs) {
  TaxonomyTree tree;
  for (const auto& [child, parent] : pairs) {
    if (child.empty() || parent.empty()) {
      throw InvariantError("taxonomy: empty token");
    }
    auto [it, inserted] = tree.parent_.emplace(child, parent);
    if (!inserted && it->second != parent) {
      throw InvariantError("taxonomy: token '" + child +
                           "' has more than one parent");
    }
    if (child == parent) {
      if (!tree.root_.empty() && tree.root_ != child) {
        throw InvariantError("taxonomy: more than one root ('" + tree.root_ +
                             "', '" + child + "')");
      }
      tree.root_ = child;
    }
  }
  if (tree.root_.empty()) throw InvariantError("taxonomy: no root");
  for (const auto& [child, parent] : tree.parent_) {
    if (!tree.parent_.count(parent)) {
      throw InvariantError("taxonomy: parent '" + parent + "' of '" + child +
                           "' is not a node");
    }
  }
  // Depths; a walk longer than the node count means a cycle.
  for (const auto& [node, unused] : tree.parent_) {
    int depth = 0;
    Token cur = node;
    while (cur != tree.root_) {
      if (auto it = tree.depth_.find(cur); it != tree.depth_.end()) {
        depth += it->second;
        break;
      }
      cur = tree.parent_.at(cur);
      if (++depth > static_cast<int>(tree.parent_.size())) {
        throw InvariantError("taxonomy: cycle through '" + node + "'");
      }
    }
    tree.depth_[node] = depth;
  }
  return tree;
}

std::vector<Token> TaxonomyTree::Nodes() const {
  std::vector<Token> out;
  out.reserve(parent_.size());
  for (const auto& [node, unused] : parent_) out.push_back(node);
  return out;
}

const Token& TaxonomyTree::Parent(const Token& t) const {
  auto it = parent_.find(t);
  if (it == parent_.end()) throw InvariantError("unknown token '" + t + "'");
  return it->second;
}

int TaxonomyTree::Depth(const Token& t) const {
  auto it = depth_.find(t);
  if (it == depth_.end()) throw InvariantError("unknown token '" + t + "'");
  return it->second;
}

std::vector<Token> TaxonomyTree::PathToRoot(const Token& t) const {
  std::vector<Token> path{t};
  Token cur = t;
  while (cur != root_) {
    cur = Parent(cur);
    path.push_back(cur);
  }
  return path;
}

std::vector<Token> TaxonomyTree::Children(const Token& t) const {
  std::vector<Token> out;
  for (const auto& [child, parent] : parent_) {
    if (parent == t && child != root_) out.push_back(child);
  }
  return out;
}

std::vector<Token> TaxonomyTree::AtDepth(int depth) const {
  std::vector<Token> out;
  for (const auto& [node, d] : depth_) {
    if (d == depth) out.push_back(node);
  }
  return out;
}

std::set<Token> EventVector::Support() const {
  std::set<Token> out;
  for (const auto& [t, w] : weights) out.insert(t);
  return out;
}

std::string RealThreatGroup::Id() const {
  Encoder e;
  for (const Token& t : events) e.PutString(t);
  return ToHex(Sha256(e.bytes())).substr(0, 16);
}

void Validate(const Event& e) {
  if (e.event_id.empty()) throw InvariantError("event: empty event_id");
  if (e.timestamp < 0) {
    throw InvariantError("event '" + e.event_id + "': negative timestamp");
  }
}

namespace {

void ValidateRecords(const std::vector<Event>& records) {
  for (size_t i = 0; i < records.size(); ++i) {
    Validate(records[i]);
    if (i > 0 && records[i].timestamp < records[i - 1].timestamp) {
      throw InvariantError("log: records are not timestamp-ordered");
    }
  }
}

}  // namespace

void Validate(const EventLog& log) {
  if (log.gateway.pseudonym.empty()) throw InvariantError("log: no gateway");
  ValidateRecords(log.records);
}

void Validate(const SanitizedLog& log) {
  if (log.gateway.pseudonym.empty()) throw InvariantError("log: no gateway");
  ValidateRecords(log.records);
}

void Validate(const EventVector& v) {
  for (const auto& [t, w] : v.weights) {
    if (!(w > 0.0)) {
      throw InvariantError("event vector: non-positive weight for '" + t + "'");
    }
  }
  if (v.weights.size() > v.dimension) {
    throw InvariantError("event vector: more weights than dimension");
  }
}

void Validate(const RealThreatGroup& g) {
  if (g.events.empty()) throw InvariantError("real group: no defining events");
  if (!g.events.count(g.core_point)) {
    throw InvariantError("real group: core point '" + g.core_point +
                         "' is not a defining event");
  }
}

bool SatisfiesDisjointness(const VirtualThreatGroup& vc) {
  std::set<GatewayId> seen;
  std::set<std::set<Token>> event_sets;
  for (const RealThreatGroup& g : vc.groups) {
    for (const GatewayId& m : g.members) {
      if (!seen.insert(m).second) return false;
    }
    if (!event_sets.insert(g.events).second) return false;
  }
  return true;
}

void Validate(const VirtualThreatGroup& vc) {
  if (!vc.members.count(vc.trusted_node)) {
    throw InvariantError("virtual group: trusted node is not a member");
  }
  if (vc.groups.empty()) return;  // membership only, before STI
  std::set<GatewayId> covered;
  for (const RealThreatGroup& g : vc.groups) {
    Validate(g);
    covered.insert(g.members.begin(), g.members.end());
  }
  if (covered != vc.members) {
    throw InvariantError("virtual group: members differ from union of V_sg");
  }
  if (!SatisfiesDisjointness(vc)) {
    throw InvariantError(
        "virtual group: real groups overlap or repeat an event set");
  }
}

std::set<Token> TokenSet(const std::vector<Event>& records) {
  std::set<Token> out;
  for (const Event& e : records) out.insert(e.event_id);
  return out;
}

std::map<Token, uint64_t> TokenCounts(const std::vector<Event>& records) {
  std::map<Token, uint64_t> out;
  for (const Event& e : records) ++out[e.event_id];
  return out;
}

}  // namespace concealhunt
