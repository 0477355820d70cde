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

// Random mining fixtures and a brute-force frequent set oracle.

#ifndef CONCEALHUNT_TESTS_MINING_FIXTURE_H_
#define CONCEALHUNT_TESTS_MINING_FIXTURE_H_

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "concealhunt/crypto.h"
#include "concealhunt/mining.h"
#include "concealhunt/rng.h"
#include "concealhunt/sti_protocol.h"
#include "concealhunt/weighting.h"
#include "test_util.h"

namespace concealhunt::testing {

struct MiningFixture {
  std::vector<Token> tokens;
  std::vector<sti::Member> members;
  VirtualThreatGroup vc;
  sti::Vocabulary vocab;
  CorpusStats stats;
  std::vector<sti::Transaction> pooled;
};

inline std::vector<Token> NumberedTokens(size_t n) {
  std::vector<Token> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back((i < 10 ? "e0" : "e") + std::to_string(i));
  }
  return out;
}

// Every day a gateway draws one of a few shared patterns plus noise, so
// multi-event sets become frequent.
inline MiningFixture MakeMiningFixture(uint64_t seed, size_t gateways,
                                       size_t token_count, size_t days) {
  MiningFixture f;
  Rng rng(seed);
  f.tokens = NumberedTokens(token_count);
  std::vector<std::set<Token>> patterns(3);
  for (auto& p : patterns) {
    const size_t k = 2 + rng.Below(3);
    while (p.size() < k) p.insert(f.tokens[rng.Below(token_count)]);
  }
  std::vector<SanitizedLog> logs;
  for (uint32_t g = 0; g < gateways; ++g) {
    sti::Member m;
    m.id = Gw(g);
    m.log.gateway = m.id;
    m.box = GenerateBoxKeypair(rng);
    for (size_t d = 0; d < days; ++d) {
      std::set<Token> day;
      if (rng.Below(4) != 0) {
        const auto& p = patterns[rng.Below(patterns.size())];
        day.insert(p.begin(), p.end());
      }
      const size_t noise = rng.Below(3);
      for (size_t i = 0; i < noise; ++i) day.insert(f.tokens[rng.Below(token_count)]);
      if (day.empty()) day.insert(f.tokens[rng.Below(token_count)]);
      int64_t ts = static_cast<int64_t>(d) * 86400;
      for (const Token& t : day) m.log.records.push_back({t, "dev", ts++, {}});
      f.pooled.push_back(day);
    }
    f.vc.members.insert(m.id);
    logs.push_back(m.log);
    f.members.push_back(std::move(m));
  }
  f.vc.trusted_node = Gw(0);
  f.vocab = sti::Vocabulary(f.tokens);
  f.stats = BuildCorpusStats(logs);
  return f;
}

struct OracleSet {
  uint64_t support = 0;
  std::set<Token> closure;
  friend bool operator==(const OracleSet&, const OracleSet&) = default;
};

// Every subset of at most max_size tokens whose support reaches
// num/den of the transactions; the closure keeps the tokens present in at
// least closure_num/closure_den of the supporting transactions.
inline std::map<std::set<Token>, OracleSet> BruteForceFrequent(
    const std::vector<sti::Transaction>& transactions,
    const std::vector<Token>& tokens, uint64_t num, uint64_t den,
    size_t max_size, uint64_t closure_num = 1, uint64_t closure_den = 1) {
  std::map<std::set<Token>, OracleSet> out;
  const uint64_t n = transactions.size();
  std::vector<size_t> idx;
  std::function<void(size_t)> visit = [&](size_t start) {
    if (!idx.empty()) {
      std::set<Token> s;
      for (size_t i : idx) s.insert(tokens[i]);
      OracleSet o;
      std::map<Token, uint64_t> co;
      for (const auto& t : transactions) {
        bool all = true;
        for (const Token& w : s) all = all && t.count(w);
        if (!all) continue;
        ++o.support;
        for (const Token& w : t) ++co[w];
      }
      if (o.support > 0 && o.support * den >= num * n) {
        for (const auto& [w, c] : co) {
          if (c * closure_den >= closure_num * o.support) o.closure.insert(w);
        }
        out[s] = o;
      }
    }
    if (idx.size() == max_size) return;
    for (size_t i = start; i < tokens.size(); ++i) {
      idx.push_back(i);
      visit(i + 1);
      idx.pop_back();
    }
  };
  visit(0);
  return out;
}

inline std::map<std::set<Token>, OracleSet> AsOracle(
    const std::vector<sti::FrequentEventSet>& sets) {
  std::map<std::set<Token>, OracleSet> out;
  for (const auto& s : sets) out[s.events] = {s.support, s.closure};
  return out;
}

}  // namespace concealhunt::testing

#endif  // CONCEALHUNT_TESTS_MINING_FIXTURE_H_
