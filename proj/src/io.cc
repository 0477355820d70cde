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

#include "concealhunt/io.h"

#include <fstream>
#include <map>
#include <sstream>

#include "concealhunt/error.h"

namespace concealhunt {

using nlohmann::json;

namespace {

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvariantError("cannot open " + path.string());
  return in;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvariantError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<EventLog> ReadEventLogs(std::istream& in) {
  std::vector<EventLog> logs;
  std::map<std::string, size_t> slot;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw InvariantError("event log line " + std::to_string(lineno) + ": " +
                           e.what());
    }
    try {
      const std::string gw = j.at("gateway").get<std::string>();
      Event ev;
      ev.event_id = j.at("event").get<std::string>();
      ev.device_id = j.value("device", "");
      ev.timestamp = j.at("ts").get<int64_t>();
      if (j.contains("attrs")) {
        for (const auto& [k, v] : j.at("attrs").items()) {
          ev.attrs[k] = v.get<std::string>();
        }
      }
      Validate(ev);
      auto [it, inserted] = slot.emplace(gw, logs.size());
      if (inserted) {
        logs.push_back(
            EventLog{GatewayId{gw, static_cast<uint32_t>(logs.size())}, {}});
      }
      logs[it->second].records.push_back(std::move(ev));
    } catch (const json::exception& e) {
      throw InvariantError("event log line " + std::to_string(lineno) + ": " +
                           e.what());
    }
  }
  for (const EventLog& log : logs) Validate(log);
  return logs;
}

std::vector<EventLog> ReadEventLogs(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  return ReadEventLogs(in);
}

void WriteEventLogs(std::ostream& out, const std::vector<EventLog>& logs) {
  for (const EventLog& log : logs) {
    for (const Event& e : log.records) {
      json j;
      j["gateway"] = log.gateway.pseudonym;
      j["event"] = e.event_id;
      j["device"] = e.device_id;
      j["ts"] = e.timestamp;
      j["attrs"] = e.attrs;
      out << j.dump() << '\n';
    }
  }
}

void WriteEventLogs(const std::filesystem::path& path,
                    const std::vector<EventLog>& logs) {
  auto out = OpenOut(path);
  WriteEventLogs(out, logs);
}

TaxonomyTree ReadTaxonomy(std::istream& in) {
  std::vector<std::pair<Token, Token>> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InvariantError("taxonomy line without TAB: '" + line + "'");
    }
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return TaxonomyTree::FromPairs(pairs);
}

TaxonomyTree ReadTaxonomy(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  return ReadTaxonomy(in);
}

void WriteTaxonomy(std::ostream& out, const TaxonomyTree& taxonomy) {
  for (const auto& [child, parent] : taxonomy.parents()) {
    out << child << '\t' << parent << '\n';
  }
}

void WriteTaxonomy(const std::filesystem::path& path,
                   const TaxonomyTree& taxonomy) {
  auto out = OpenOut(path);
  WriteTaxonomy(out, taxonomy);
}

json PolicyToJson(const SanitizePolicy& policy) {
  json j;
  j["sensitive"] = policy.sensitive_events;
  j["generalize"] = policy.generalize_events;
  j["default_depth"] = policy.default_depth;
  return j;
}

SanitizePolicy PolicyFromJson(const json& j) {
  try {
    SanitizePolicy p;
    p.sensitive_events = j.value("sensitive", std::set<Token>{});
    p.generalize_events = j.value("generalize", std::map<Token, int>{});
    p.default_depth = j.at("default_depth").get<int>();
    return p;
  } catch (const json::exception& e) {
    throw InvariantError(std::string("policy: ") + e.what());
  }
}

SanitizePolicy ReadPolicy(const std::filesystem::path& path) {
  return PolicyFromJson(ReadJson(path));
}

void WritePolicy(const std::filesystem::path& path,
                 const SanitizePolicy& policy) {
  WriteJson(path, PolicyToJson(policy));
}

json ReadJson(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

void WriteJson(const std::filesystem::path& path, const json& j) {
  auto out = OpenOut(path);
  out << j.dump(2) << '\n';
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void WriteLines(const std::filesystem::path& path,
                const std::vector<std::string>& lines) {
  auto out = OpenOut(path);
  for (const std::string& l : lines) out << l << '\n';
}

}  // namespace concealhunt
