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

#ifndef CONCEALHUNT_WEIGHTING_H_
#define CONCEALHUNT_WEIGHTING_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>

#include "concealhunt/core_model.h"

namespace concealhunt {

enum class LogBase { kE, k2, k10 };

// Parses "e", "2" or "10".
LogBase ParseLogBase(const std::string& s);
double Logarithm(double x, LogBase base);

struct CorpusStats {
  uint32_t gateway_count = 0;
  std::map<Token, uint32_t> log_frequency;  // logs containing the token
};

CorpusStats BuildCorpusStats(std::span<const SanitizedLog> logs);
// Histogram form; each map is one gateway's token counts.
CorpusStats BuildCorpusStats(
    std::span<const std::map<Token, uint64_t>> histograms);

// #w in log / #events in log. Throws InvariantError for an empty log.
double TermFrequency(const SanitizedLog& log, const Token& w);

// log(gateway_count / log_frequency[w]). Throws InvariantError when w is in
// no log.
double InverseLogFrequency(const CorpusStats& stats, const Token& w,
                           LogBase base = LogBase::kE);

// TF x ILF per distinct token; zero products are omitted.
EventVector BuildEventVector(const SanitizedLog& log, const CorpusStats& stats,
                             LogBase base = LogBase::kE);
EventVector BuildEventVector(const GatewayId& owner,
                             const std::map<Token, uint64_t>& counts,
                             const CorpusStats& stats,
                             LogBase base = LogBase::kE);

// 2|Vc ∩ Vd| / (|Vc|^2 + |Vd|^2) over nonzero-weight tokens; 0 when both
// vectors are empty. The sizes are squared; ClassicDice is the unsquared
// form.
double GatewaysSimilarity(const EventVector& vc, const EventVector& vd);
double GatewaysSimilarity(uint64_t intersection, uint64_t size_c,
                          uint64_t size_d);

// 2|Vc ∩ Vd| / (|Vc| + |Vd|), reported side by side when requested.
double ClassicDice(const EventVector& vc, const EventVector& vd);
double ClassicDice(uint64_t intersection, uint64_t size_c, uint64_t size_d);

}  // namespace concealhunt

#endif  // CONCEALHUNT_WEIGHTING_H_
