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

#ifndef CONCEALHUNT_STI_RING_H_
#define CONCEALHUNT_STI_RING_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "concealhunt/channel.h"
#include "concealhunt/crypto.h"
#include "concealhunt/mining.h"

namespace concealhunt::sti {

// Bidirectional map between event tokens and their 64-bit identifiers for a
// public vocabulary. Construction fails on an identifier collision.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<Token>& tokens);

  uint64_t Id(const Token& t) const;
  const Token& Label(uint64_t id) const;  // throws ProtocolAbort if unknown
  bool Contains(const Token& t) const { return ids_.count(t) > 0; }
  std::set<Token> Tokens() const;

 private:
  std::map<Token, uint64_t> ids_;
  std::map<uint64_t, Token> labels_;
};

// A ring participant as seen by the commutative-cipher rounds.
struct RingMember {
  GatewayId id;
  CommutativeKey key;
  Rng* rng = nullptr;
};

using EncryptedEntry = std::vector<BigInt>;
using EncryptedList = std::vector<EncryptedEntry>;

nlohmann::json ToJson(const EncryptedList& list);
EncryptedList EncryptedListFromJson(const nlohmann::json& j);

// Every member encrypts its own (shuffled) records and forwards them; each
// list travels the ring collecting every member's layer and is then handed to
// the trusted node. Returns the fully layered lists in origin order.
std::vector<EncryptedList> RingCollect(
    std::span<const RingMember> members, const GatewayId& trusted,
    std::span<const std::vector<Bytes>> records, const CommutativeGroup& group,
    Channel& channel, const std::string& step);

// The trusted node pools and shuffles the entries; they then visit every
// other member in random order, each removing its own layer and reshuffling,
// and return to the trusted node wrapped only in its own layer.
EncryptedList PeelRound(std::span<const RingMember> members,
                        const RingMember& trusted,
                        const std::vector<EncryptedList>& collected,
                        Channel& channel, const std::string& step);

// Removes the trusted node's layer. Throws ProtocolAbort when any entry
// still carries another layer.
std::vector<Bytes> FinalPeel(const CommutativeKey& trusted_key,
                             const EncryptedList& bundle,
                             const CommutativeGroup& group);

// Catalog record codecs. Itemsets travel as sorted token identifiers.
Bytes EncodeCatalogRecord(uint8_t tag, const Itemset& itemset, uint64_t count,
                          const std::set<Token>& closure,
                          const Vocabulary& vocab);
struct CatalogRecord {
  uint8_t tag = 0;
  Itemset itemset;
  uint64_t count = 0;
  std::set<Token> closure;
};
CatalogRecord DecodeCatalogRecord(std::span<const uint8_t> bytes,
                                  const Vocabulary& vocab);

inline constexpr uint8_t kLocalRecord = 'L';
inline constexpr uint8_t kCountRecord = 'C';

// Global support = sum of the counts, global closure = intersection of the
// closures of contributing (count > 0) entries. The record for the empty
// itemset carries a member's transaction count. Sets below min_support of
// the pooled transactions are dropped.
GlobalCatalog AggregateCounts(std::span<const CatalogRecord> records,
                              double min_support);

// FinalPeel + decode + AggregateCounts.
GlobalCatalog AggregateGlobal(const CommutativeKey& trusted_key,
                              const EncryptedList& bundle,
                              const CommutativeGroup& group,
                              const Vocabulary& vocab, double min_support);

}  // namespace concealhunt::sti

#endif  // CONCEALHUNT_STI_RING_H_
