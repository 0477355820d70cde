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

#include "concealhunt/evaluate.h"

#include <fstream>

#include "concealhunt/error.h"

namespace concealhunt::harness {

using nlohmann::json;

Metrics Evaluate(std::span<const ExtractedGroup> groups,
                 const std::map<std::string, uint32_t>& topic_of) {
  std::map<uint32_t, size_t> topic_sizes;
  for (const auto& [p, t] : topic_of) ++topic_sizes[t];

  Metrics m;
  for (const ExtractedGroup& g : groups) {
    std::map<uint32_t, size_t> overlap;
    for (const std::string& p : g.members) {
      auto it = topic_of.find(p);
      if (it == topic_of.end()) {
        throw InvariantError("gateway " + p + " has no planted topic");
      }
      ++overlap[it->second];
    }
    GroupMetrics gm;
    gm.group_id = g.id;
    gm.size = g.members.size();
    for (const auto& [t, c] : overlap) {
      if (c > gm.overlap) {
        gm.overlap = c;
        gm.topic = t;
      }
    }
    gm.topic_size = topic_sizes[gm.topic];
    if (gm.size > 0) gm.precision = double(gm.overlap) / double(gm.size);
    if (gm.topic_size > 0) gm.recall = double(gm.overlap) / double(gm.topic_size);
    if (gm.precision + gm.recall > 0) {
      gm.f1 = 2 * gm.precision * gm.recall / (gm.precision + gm.recall);
    }
    m.macro_precision += gm.precision;
    m.macro_recall += gm.recall;
    m.macro_f1 += gm.f1;
    m.groups.push_back(gm);
  }
  if (!m.groups.empty()) {
    const double n = static_cast<double>(m.groups.size());
    m.macro_precision /= n;
    m.macro_recall /= n;
    m.macro_f1 /= n;
  }
  return m;
}

std::vector<ExtractedGroup> RealGroupsFromJson(const json& groups) {
  std::vector<ExtractedGroup> out;
  for (const json& vc : groups.at("virtual_groups")) {
    for (const json& g : vc.at("real_groups")) {
      out.push_back({g.at("id").get<std::string>(),
                     g.at("members").get<std::set<std::string>>()});
    }
  }
  return out;
}

std::vector<ExtractedGroup> VirtualGroupsFromJson(const json& groups) {
  std::vector<ExtractedGroup> out;
  for (const json& vc : groups.at("virtual_groups")) {
    out.push_back({vc.at("trusted_node").get<std::string>(),
                   vc.at("members").get<std::set<std::string>>()});
  }
  return out;
}

void WriteMetricsCsv(const std::filesystem::path& path,
                     const std::map<std::string, Metrics>& by_level) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "level,group_id,topic,size,overlap,topic_size,precision,recall,f1\n";
  for (const auto& [level, m] : by_level) {
    for (const GroupMetrics& g : m.groups) {
      out << level << ',' << g.group_id << ',' << g.topic << ',' << g.size
          << ',' << g.overlap << ',' << g.topic_size << ',' << g.precision
          << ',' << g.recall << ',' << g.f1 << '\n';
    }
    out << level << ",macro,,,,," << m.macro_precision << ','
        << m.macro_recall << ',' << m.macro_f1 << '\n';
  }
}

}  // namespace concealhunt::harness
