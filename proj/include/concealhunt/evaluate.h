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

#ifndef CONCEALHUNT_EVALUATE_H_
#define CONCEALHUNT_EVALUATE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace concealhunt::harness {

struct ExtractedGroup {
  std::string id;
  std::set<std::string> members;  // pseudonyms
};

struct GroupMetrics {
  std::string group_id;
  uint32_t topic = 0;  // matched planted topic
  size_t size = 0;
  size_t overlap = 0;
  size_t topic_size = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  std::vector<GroupMetrics> groups;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

// Each group is matched to the topic with the largest overlap (ties go to
// the smaller topic). Throws InvariantError when a member has no topic.
Metrics Evaluate(std::span<const ExtractedGroup> groups,
                 const std::map<std::string, uint32_t>& topic_of);

// Real or virtual groups of a groups.json document.
std::vector<ExtractedGroup> RealGroupsFromJson(const nlohmann::json& groups);
std::vector<ExtractedGroup> VirtualGroupsFromJson(const nlohmann::json& groups);

// Rows: level,group_id,topic,size,overlap,topic_size,precision,recall,f1
// followed by one macro row per level.
void WriteMetricsCsv(const std::filesystem::path& path,
                     const std::map<std::string, Metrics>& by_level);

}  // namespace concealhunt::harness

#endif  // CONCEALHUNT_EVALUATE_H_
