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

#include "concealhunt/weighting.h"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "concealhunt/error.h"

namespace concealhunt {

LogBase ParseLogBase(const std::string& s) {
  if (s == "e") return LogBase::kE;
  if (s == "2") return LogBase::k2;
  if (s == "10") return LogBase::k10;
  throw ConfigError("log_base must be e, 2 or 10 (got '" + s + "')");
}

double Logarithm(double x, LogBase base) {
  switch (base) {
    case LogBase::k2:
      return std::log2(x);
    case LogBase::k10:
      return std::log10(x);
    case LogBase::kE:
      break;
  }
  return std::log(x);
}

CorpusStats BuildCorpusStats(std::span<const SanitizedLog> logs) {
  CorpusStats stats;
  stats.gateway_count = static_cast<uint32_t>(logs.size());
  for (const SanitizedLog& log : logs) {
    for (const Token& t : TokenSet(log.records)) ++stats.log_frequency[t];
  }
  return stats;
}

CorpusStats BuildCorpusStats(
    std::span<const std::map<Token, uint64_t>> histograms) {
  CorpusStats stats;
  stats.gateway_count = static_cast<uint32_t>(histograms.size());
  for (const auto& h : histograms) {
    for (const auto& [t, n] : h) {
      if (n > 0) ++stats.log_frequency[t];
    }
  }
  return stats;
}

double TermFrequency(const SanitizedLog& log, const Token& w) {
  if (log.records.empty()) {
    throw InvariantError("term frequency of an empty log");
  }
  const auto n = std::count_if(log.records.begin(), log.records.end(),
                               [&](const Event& e) { return e.event_id == w; });
  return static_cast<double>(n) / static_cast<double>(log.records.size());
}

double InverseLogFrequency(const CorpusStats& stats, const Token& w,
                           LogBase base) {
  auto it = stats.log_frequency.find(w);
  if (it == stats.log_frequency.end() || it->second == 0) {
    throw InvariantError("token '" + w + "' occurs in no log");
  }
  return Logarithm(static_cast<double>(stats.gateway_count) / it->second, base);
}

EventVector BuildEventVector(const GatewayId& owner,
                             const std::map<Token, uint64_t>& counts,
                             const CorpusStats& stats, LogBase base) {
  uint64_t total = 0;
  for (const auto& [t, n] : counts) total += n;
  if (total == 0) throw InvariantError("event vector of an empty log");

  EventVector v;
  v.owner = owner;
  for (const auto& [t, n] : counts) {
    if (n == 0) continue;
    ++v.dimension;
    const double tf = static_cast<double>(n) / static_cast<double>(total);
    const double w = tf * InverseLogFrequency(stats, t, base);
    if (w > 0.0) v.weights.emplace(t, w);
  }
  return v;
}

EventVector BuildEventVector(const SanitizedLog& log, const CorpusStats& stats,
                             LogBase base) {
  if (log.records.empty()) throw InvariantError("event vector of an empty log");
  return BuildEventVector(log.gateway, TokenCounts(log.records), stats, base);
}

namespace {

uint64_t IntersectionSize(const EventVector& a, const EventVector& b) {
  uint64_t n = 0;
  for (const auto& [t, w] : a.weights) n += b.weights.count(t);
  return n;
}

}  // namespace

double GatewaysSimilarity(uint64_t intersection, uint64_t size_c,
                          uint64_t size_d) {
  const double denom = static_cast<double>(size_c) * size_c +
                       static_cast<double>(size_d) * size_d;
  if (denom == 0.0) return 0.0;
  return 2.0 * static_cast<double>(intersection) / denom;
}

double GatewaysSimilarity(const EventVector& vc, const EventVector& vd) {
  return GatewaysSimilarity(IntersectionSize(vc, vd), vc.weights.size(),
                            vd.weights.size());
}

double ClassicDice(uint64_t intersection, uint64_t size_c, uint64_t size_d) {
  if (size_c + size_d == 0) return 0.0;
  return 2.0 * static_cast<double>(intersection) /
         static_cast<double>(size_c + size_d);
}

double ClassicDice(const EventVector& vc, const EventVector& vd) {
  return ClassicDice(IntersectionSize(vc, vd), vc.weights.size(),
                     vd.weights.size());
}

}  // namespace concealhunt
