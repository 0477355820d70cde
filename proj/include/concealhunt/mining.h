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

#ifndef CONCEALHUNT_MINING_H_
#define CONCEALHUNT_MINING_H_

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "concealhunt/core_model.h"

namespace concealhunt::sti {

using Itemset = std::set<Token>;
using Transaction = std::set<Token>;

inline constexpr int64_t kSecondsPerDay = 86400;

// One transaction per period bucket of the record timestamps.
std::vector<Transaction> BucketTransactions(const std::vector<Event>& records,
                                            int64_t period = kSecondsPerDay);

struct MiningParams {
  double min_support = 0.3;  // fraction of transactions
  double min_closure = 0.5;  // fraction of supporting transactions
  size_t max_size = 3;       // deepest Apriori level
};

struct FrequentEventSet {
  Itemset events;
  uint64_t support = 0;     // local or global transaction count
  std::set<Token> closure;  // always a superset of events when support > 0

  friend bool operator==(const FrequentEventSet&,
                         const FrequentEventSet&) = default;
};

bool MeetsSupport(uint64_t count, uint64_t transactions, double min_support);

// Support count of itemset and its closure: the candidate events present in
// at least min_closure of the supporting transactions.
FrequentEventSet CountItemset(std::span<const Transaction> transactions,
                              const Itemset& itemset,
                              const std::set<Token>& candidates,
                              double min_closure);

// Level-wise Apriori over the candidate events. Output is ordered by size,
// then lexicographically.
std::vector<FrequentEventSet> LocalFrequentEvents(
    std::span<const Transaction> transactions,
    const std::set<Token>& candidates, const MiningParams& params);

struct GlobalCatalog {
  std::vector<FrequentEventSet> sets;  // support = global support
  uint64_t transactions = 0;
};

// Orders itemsets by size, then lexicographically.
bool ItemsetLess(const Itemset& a, const Itemset& b);

}  // namespace concealhunt::sti

#endif  // CONCEALHUNT_MINING_H_
