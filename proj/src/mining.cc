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

#include "concealhunt/mining.h"

#include <algorithm>
#include <map>

#include "concealhunt/error.h"

namespace concealhunt::sti {

std::vector<Transaction> BucketTransactions(const std::vector<Event>& records,
                                            int64_t period) {
  if (period <= 0) throw InvariantError("transaction period must be positive");
  std::map<int64_t, Transaction> buckets;
  for (const Event& e : records) buckets[e.timestamp / period].insert(e.event_id);
  std::vector<Transaction> out;
  out.reserve(buckets.size());
  for (auto& [day, t] : buckets) out.push_back(std::move(t));
  return out;
}

bool MeetsSupport(uint64_t count, uint64_t transactions, double min_support) {
  if (transactions == 0 || count == 0) return false;
  return static_cast<double>(count) + 1e-9 >=
         min_support * static_cast<double>(transactions);
}

bool ItemsetLess(const Itemset& a, const Itemset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

FrequentEventSet CountItemset(std::span<const Transaction> transactions,
                              const Itemset& itemset,
                              const std::set<Token>& candidates,
                              double min_closure) {
  FrequentEventSet out;
  out.events = itemset;
  std::map<Token, uint64_t> co;
  for (const Transaction& t : transactions) {
    if (!std::includes(t.begin(), t.end(), itemset.begin(), itemset.end())) {
      continue;
    }
    ++out.support;
    for (const Token& w : t) {
      if (candidates.count(w)) ++co[w];
    }
  }
  if (out.support == 0) return out;
  for (const auto& [w, n] : co) {
    if (static_cast<double>(n) + 1e-9 >= min_closure * out.support) {
      out.closure.insert(w);
    }
  }
  return out;
}

std::vector<FrequentEventSet> LocalFrequentEvents(
    std::span<const Transaction> transactions,
    const std::set<Token>& candidates, const MiningParams& params) {
  if (!(params.min_support > 0.0) || params.min_support > 1.0) {
    throw InvariantError("min_support must be in (0, 1]");
  }
  std::vector<FrequentEventSet> out;
  if (candidates.empty() || transactions.empty() || params.max_size == 0) {
    return out;
  }
  const uint64_t n = transactions.size();

  std::vector<Itemset> level;
  for (const Token& w : candidates) {
    FrequentEventSet f =
        CountItemset(transactions, {w}, candidates, params.min_closure);
    if (MeetsSupport(f.support, n, params.min_support)) {
      level.push_back(f.events);
      out.push_back(std::move(f));
    }
  }

  for (size_t k = 2; k <= params.max_size && level.size() >= 2; ++k) {
    const std::set<Itemset> previous(level.begin(), level.end());
    std::set<Itemset> next;
    // Join pairs sharing their first k-2 items.
    for (size_t a = 0; a < level.size(); ++a) {
      for (size_t b = a + 1; b < level.size(); ++b) {
        auto ia = level[a].begin();
        auto ib = level[b].begin();
        bool shared_prefix = true;
        for (size_t i = 0; i + 2 < k; ++i, ++ia, ++ib) {
          if (*ia != *ib) {
            shared_prefix = false;
            break;
          }
        }
        if (!shared_prefix) continue;
        Itemset joined = level[a];
        joined.insert(level[b].begin(), level[b].end());
        if (joined.size() != k) continue;
        bool all_subsets_frequent = true;
        for (const Token& drop : joined) {
          Itemset sub = joined;
          sub.erase(drop);
          if (!previous.count(sub)) {
            all_subsets_frequent = false;
            break;
          }
        }
        if (all_subsets_frequent) next.insert(std::move(joined));
      }
    }
    level.clear();
    for (const Itemset& cand : next) {
      FrequentEventSet f =
          CountItemset(transactions, cand, candidates, params.min_closure);
      if (MeetsSupport(f.support, n, params.min_support)) {
        level.push_back(f.events);
        out.push_back(std::move(f));
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FrequentEventSet& a, const FrequentEventSet& b) {
              return ItemsetLess(a.events, b.events);
            });
  return out;
}

}  // namespace concealhunt::sti
