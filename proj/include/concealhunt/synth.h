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

#ifndef CONCEALHUNT_SYNTH_H_
#define CONCEALHUNT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "concealhunt/core_model.h"
#include "concealhunt/sanitizer.h"

namespace concealhunt::harness {

struct SynthConfig {
  uint32_t num_gateways = 16;
  uint32_t num_devices = 30;
  uint32_t num_threat_services = 54;
  uint32_t actions_per_service = 3;
  uint32_t days = 60;
  uint32_t events_per_day = 40;
  uint32_t planted_topics = 4;
  uint32_t topic_services = 6;      // core services per topic
  double dominance = 0.8;           // share of daily events from the topic
  double sensitive_fraction = 0.2;  // share of each topic's actions
  double leak_fraction = 0.0;
  int sanitize_depth = 2;
  uint64_t rng_seed = 1;
};

// Throws ConfigError naming the offending field.
void ValidateSynthConfig(const SynthConfig& config);

struct GroundTruth {
  std::map<std::string, uint32_t> topic_of;           // pseudonym -> topic
  std::map<uint32_t, std::set<Token>> topic_vocabulary;  // core services
  std::set<Token> sensitive;                          // every sensitive action
  std::map<std::string, std::set<Token>> leaked;      // disclosed per gateway
};

struct Dataset {
  std::vector<EventLog> logs;
  TaxonomyTree taxonomy;
  std::map<std::string, SanitizePolicy> policies;  // by pseudonym
  GroundTruth truth;
};

// Deterministic under config.rng_seed.
Dataset Synthesize(const SynthConfig& config);

// Directory layout: logs.jsonl, taxonomy.tsv, policies.json, truth.json.
void WriteDataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset ReadDataset(const std::filesystem::path& dir);

nlohmann::json TruthToJson(const GroundTruth& truth);
GroundTruth TruthFromJson(const nlohmann::json& j);

}  // namespace concealhunt::harness

#endif  // CONCEALHUNT_SYNTH_H_
