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

#ifndef CONCEALHUNT_IO_H_
#define CONCEALHUNT_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "concealhunt/core_model.h"
#include "concealhunt/sanitizer.h"

namespace concealhunt {

// Event-log files: one JSON object per line with keys gateway, event,
// device, ts, attrs. Gateway indices follow order of first appearance.
std::vector<EventLog> ReadEventLogs(std::istream& in);
std::vector<EventLog> ReadEventLogs(const std::filesystem::path& path);
void WriteEventLogs(std::ostream& out, const std::vector<EventLog>& logs);
void WriteEventLogs(const std::filesystem::path& path,
                    const std::vector<EventLog>& logs);

// Taxonomy files: one "child<TAB>parent" pair per line; the root is listed
// as its own parent.
TaxonomyTree ReadTaxonomy(std::istream& in);
TaxonomyTree ReadTaxonomy(const std::filesystem::path& path);
void WriteTaxonomy(std::ostream& out, const TaxonomyTree& taxonomy);
void WriteTaxonomy(const std::filesystem::path& path,
                   const TaxonomyTree& taxonomy);

// Policy files: {"sensitive": [...], "generalize": {token: depth},
// "default_depth": n}.
nlohmann::json PolicyToJson(const SanitizePolicy& policy);
SanitizePolicy PolicyFromJson(const nlohmann::json& j);
SanitizePolicy ReadPolicy(const std::filesystem::path& path);
void WritePolicy(const std::filesystem::path& path,
                 const SanitizePolicy& policy);

nlohmann::json ReadJson(const std::filesystem::path& path);
void WriteJson(const std::filesystem::path& path, const nlohmann::json& j);
std::vector<std::string> ReadLines(const std::filesystem::path& path);
void WriteLines(const std::filesystem::path& path,
                const std::vector<std::string>& lines);

}  // namespace concealhunt

#endif  // CONCEALHUNT_IO_H_
