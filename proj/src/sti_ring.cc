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

#include "concealhunt/sti_ring.h"

#include <algorithm>

#include "concealhunt/canonical.h"
#include "concealhunt/error.h"

namespace concealhunt::sti {

using nlohmann::json;

namespace {

constexpr const char* kPhase = "sti";

void EncryptInPlace(EncryptedList& list, const CommutativeKey& key) {
  for (EncryptedEntry& entry : list) {
    for (BigInt& x : entry) x = CommEncrypt(x, key);
  }
}

void DecryptInPlace(EncryptedList& list, const CommutativeKey& key) {
  for (EncryptedEntry& entry : list) {
    for (BigInt& x : entry) x = CommDecrypt(x, key);
  }
}

EncryptedList Pass(Channel& channel, const std::string& step,
                   const GatewayId& from, const GatewayId& to,
                   const EncryptedList& list) {
  if (from == to) return list;
  return EncryptedListFromJson(
      channel.Deliver({kPhase, step, from.pseudonym, to.pseudonym, ToJson(list)}));
}

}  // namespace

Vocabulary::Vocabulary(const std::vector<Token>& tokens) {
  for (const Token& t : tokens) {
    const uint64_t id = TokenId(t);
    auto [it, inserted] = labels_.emplace(id, t);
    if (!inserted && it->second != t) {
      throw InvariantError("token identifier collision between '" + t +
                           "' and '" + it->second + "'");
    }
    ids_[t] = id;
  }
}

uint64_t Vocabulary::Id(const Token& t) const {
  auto it = ids_.find(t);
  if (it == ids_.end()) {
    throw InvariantError("token '" + t + "' is not in the public vocabulary");
  }
  return it->second;
}

const Token& Vocabulary::Label(uint64_t id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) {
    throw ProtocolAbort("unknown event identifier " + TokenIdHex(id));
  }
  return it->second;
}

std::set<Token> Vocabulary::Tokens() const {
  std::set<Token> out;
  for (const auto& [t, id] : ids_) out.insert(t);
  return out;
}

json ToJson(const EncryptedList& list) {
  json arr = json::array();
  for (const EncryptedEntry& e : list) arr.push_back(concealhunt::ToJson(e));
  return arr;
}

EncryptedList EncryptedListFromJson(const json& j) {
  if (!j.is_array()) throw ProtocolAbort("expected an encrypted list");
  EncryptedList out;
  out.reserve(j.size());
  for (const json& e : j) out.push_back(BigIntsFromJson(e));
  return out;
}

std::vector<EncryptedList> RingCollect(
    std::span<const RingMember> members, const GatewayId& trusted,
    std::span<const std::vector<Bytes>> records, const CommutativeGroup& group,
    Channel& channel, const std::string& step) {
  const size_t n = members.size();
  if (records.size() != n) {
    throw InvariantError("ring collect: one record list per member required");
  }
  std::vector<EncryptedList> at_trusted;
  at_trusted.reserve(n);
  for (size_t origin = 0; origin < n; ++origin) {
    const RingMember& owner = members[origin];
    std::vector<Bytes> own = records[origin];
    owner.rng->Shuffle(own);
    EncryptedList list;
    list.reserve(own.size());
    for (const Bytes& r : own) list.push_back(EmbedRecord(r, group));
    EncryptInPlace(list, owner.key);

    size_t holder = origin;
    for (size_t hop = 1; hop < n; ++hop) {
      const size_t next = (origin + hop) % n;
      list = Pass(channel, step + ".collect", members[holder].id,
                  members[next].id, list);
      EncryptInPlace(list, members[next].key);
      holder = next;
    }
    list = Pass(channel, step + ".submit", members[holder].id, trusted, list);
    at_trusted.push_back(std::move(list));
  }
  return at_trusted;
}

EncryptedList PeelRound(std::span<const RingMember> members,
                        const RingMember& trusted,
                        const std::vector<EncryptedList>& collected,
                        Channel& channel, const std::string& step) {
  EncryptedList bundle;
  for (const EncryptedList& l : collected) {
    bundle.insert(bundle.end(), l.begin(), l.end());
  }
  trusted.rng->Shuffle(bundle);

  std::vector<const RingMember*> order;
  for (const RingMember& m : members) {
    if (m.id != trusted.id) order.push_back(&m);
  }
  trusted.rng->Shuffle(order);

  GatewayId holder = trusted.id;
  for (const RingMember* m : order) {
    bundle = Pass(channel, step + ".peel", holder, m->id, bundle);
    DecryptInPlace(bundle, m->key);
    m->rng->Shuffle(bundle);
    holder = m->id;
  }
  return Pass(channel, step + ".return", holder, trusted.id, bundle);
}

std::vector<Bytes> FinalPeel(const CommutativeKey& trusted_key,
                             const EncryptedList& bundle,
                             const CommutativeGroup& group) {
  std::vector<Bytes> out;
  out.reserve(bundle.size());
  for (const EncryptedEntry& entry : bundle) {
    EncryptedEntry plain;
    plain.reserve(entry.size());
    for (const BigInt& x : entry) plain.push_back(CommDecrypt(x, trusted_key));
    try {
      out.push_back(ExtractRecord(plain, group));
    } catch (const CryptoError&) {
      throw ProtocolAbort("peel-off incomplete: an entry still carries a layer");
    }
  }
  return out;
}

Bytes EncodeCatalogRecord(uint8_t tag, const Itemset& itemset, uint64_t count,
                          const std::set<Token>& closure,
                          const Vocabulary& vocab) {
  auto put_ids = [&](Encoder& e, const std::set<Token>& tokens) {
    std::vector<uint64_t> ids;
    for (const Token& t : tokens) ids.push_back(vocab.Id(t));
    std::sort(ids.begin(), ids.end());
    e.PutU32(static_cast<uint32_t>(ids.size()));
    for (uint64_t id : ids) e.PutU64(id);
  };
  Encoder e;
  e.PutU8(tag);
  put_ids(e, itemset);
  e.PutU64(count);
  put_ids(e, closure);
  return e.Take();
}

CatalogRecord DecodeCatalogRecord(std::span<const uint8_t> bytes,
                                  const Vocabulary& vocab) {
  CatalogRecord r;
  try {
    Decoder d(bytes);
    r.tag = d.GetU8();
    auto get_ids = [&](std::set<Token>& out) {
      const uint32_t n = d.GetU32();
      for (uint32_t i = 0; i < n; ++i) out.insert(vocab.Label(d.GetU64()));
    };
    get_ids(r.itemset);
    r.count = d.GetU64();
    get_ids(r.closure);
    d.ExpectEnd();
  } catch (const InvariantError& e) {
    throw ProtocolAbort(std::string("malformed catalog record: ") + e.what());
  }
  return r;
}

GlobalCatalog AggregateCounts(std::span<const CatalogRecord> records,
                              double min_support) {
  struct Acc {
    uint64_t support = 0;
    bool any = false;
    std::set<Token> closure;
  };
  std::map<Itemset, Acc> acc;
  GlobalCatalog catalog;
  for (const CatalogRecord& r : records) {
    if (r.itemset.empty()) {
      catalog.transactions += r.count;
      continue;
    }
    Acc& a = acc[r.itemset];
    a.support += r.count;
    if (r.count == 0) continue;
    if (!a.any) {
      a.closure = r.closure;
      a.any = true;
    } else {
      std::set<Token> both;
      std::set_intersection(a.closure.begin(), a.closure.end(),
                            r.closure.begin(), r.closure.end(),
                            std::inserter(both, both.end()));
      a.closure = std::move(both);
    }
  }
  for (auto& [itemset, a] : acc) {
    if (!MeetsSupport(a.support, catalog.transactions, min_support)) continue;
    catalog.sets.push_back({itemset, a.support, std::move(a.closure)});
  }
  std::sort(catalog.sets.begin(), catalog.sets.end(),
            [](const FrequentEventSet& a, const FrequentEventSet& b) {
              return ItemsetLess(a.events, b.events);
            });
  return catalog;
}

GlobalCatalog AggregateGlobal(const CommutativeKey& trusted_key,
                              const EncryptedList& bundle,
                              const CommutativeGroup& group,
                              const Vocabulary& vocab, double min_support) {
  std::vector<CatalogRecord> records;
  for (const Bytes& b : FinalPeel(trusted_key, bundle, group)) {
    records.push_back(DecodeCatalogRecord(b, vocab));
  }
  return AggregateCounts(records, min_support);
}

}  // namespace concealhunt::sti
