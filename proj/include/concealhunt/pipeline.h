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

#ifndef CONCEALHUNT_PIPELINE_H_
#define CONCEALHUNT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "concealhunt/cti.h"
#include "concealhunt/str_protocol.h"
#include "concealhunt/sti_protocol.h"
#include "concealhunt/synth.h"
#include "concealhunt/weighting.h"

namespace concealhunt::harness {

struct ProtocolParams {
  str::Params str;
  sti::Params sti;
  uint64_t seed = 1;
};

// Throws ConfigError naming the offending field.
void ValidateProtocolParams(const ProtocolParams& params);

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

struct PipelineResult {
  std::vector<SanitizedLog> sanitized;
  CorpusStats stats;
  std::optional<cti::HuntSession> session;
  std::optional<str::Result> str;
  std::vector<sti::VcOutcome> sti;
  std::vector<sti::CatalogEntry> catalog;
  std::vector<PhaseTiming> timing;
  bool complete = false;
  std::string abort_reason;  // set when a protocol step aborted

  // Final real groups of every virtual group.
  std::vector<RealThreatGroup> FinalGroups() const;
};

// sanitize -> weights -> STR -> STI -> publish. A ProtocolAbort is caught and
// recorded; the result then carries whatever completed.
PipelineResult RunPipeline(const Dataset& dataset, const ProtocolParams& params);

nlohmann::json GroupsJson(const PipelineResult& result);

// groups.json, session.json, transcript.jsonl, timing.csv.
void WriteOutputs(const std::filesystem::path& dir, const PipelineResult& result);

// Categories seeded from the planted topics' core services.
std::vector<cti::ThreatCategorySeed> CategoriesFromTruth(const GroundTruth& truth);

}  // namespace concealhunt::harness

#endif  // CONCEALHUNT_PIPELINE_H_
