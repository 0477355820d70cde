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

#include "concealhunt/attack.h"

#include <map>

#include "concealhunt/crypto.h"

namespace concealhunt::harness {

using nlohmann::json;

namespace {

bool IsHex(const std::string& s) {
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return !s.empty();
}

struct Dictionary {
  std::map<std::string, Token> hashes;
  std::set<Token> labels;
};

void Scan(const json& j, const Dictionary& dict, AttackReport& r) {
  auto check = [&](const std::string& s) {
    if (dict.labels.count(s)) r.recovered.insert(s);
    if ((s.size() == 64 || s.size() == 16) && IsHex(s)) {
      ++r.digests_seen;
      auto it = dict.hashes.find(s);
      if (it != dict.hashes.end()) r.recovered.insert(it->second);
    }
  };
  if (j.is_string()) {
    check(j.get_ref<const std::string&>());
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      check(k);
      Scan(v, dict, r);
    }
  } else if (j.is_array()) {
    for (const json& v : j) Scan(v, dict, r);
  }
}

}  // namespace

AttackReport LeakageAttack(std::span<const Message> transcripts,
                           const TaxonomyTree& vocabulary,
                           const std::set<Token>& leaked,
                           const std::set<Token>& sensitive) {
  Dictionary dict;
  for (const Token& t : vocabulary.Nodes()) {
    dict.labels.insert(t);
    dict.hashes[TokenDigestHex(t)] = t;
    dict.hashes[TokenIdHex(TokenId(t))] = t;
  }
  AttackReport r;
  r.messages = transcripts.size();
  for (const Message& m : transcripts) Scan(m.payload, dict, r);
  r.leaked = leaked;

  for (const Token& t : r.recovered) {
    if (sensitive.count(t) && !leaked.count(t)) {
      r.suppressed_recovered.insert(t);
    } else if (!sensitive.count(t)) {
      r.hypernyms_recovered.insert(t);
    }
  }
  for (const Token& l : leaked) {
    if (!vocabulary.Contains(l)) continue;
    const Token& parent = vocabulary.Parent(l);
    if (!r.recovered.count(parent)) continue;
    for (const Token& sibling : vocabulary.Children(parent)) {
      if (!leaked.count(sibling)) r.inferred.insert(sibling);
    }
  }
  return r;
}

json AttackToJson(const AttackReport& r) {
  return {{"messages", r.messages},
          {"digests_seen", r.digests_seen},
          {"recovered", r.recovered},
          {"leaked", r.leaked},
          {"inferred_unconfirmed", r.inferred},
          {"hypernyms_recovered", r.hypernyms_recovered},
          {"suppressed_recovered", r.suppressed_recovered},
          {"hypernym_count", r.hypernyms_recovered.size()},
          {"suppressed_count", r.suppressed_recovered.size()}};
}

}  // namespace concealhunt::harness
