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

#ifndef CONCEALHUNT_CONFIG_H_
#define CONCEALHUNT_CONFIG_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "concealhunt/pipeline.h"
#include "concealhunt/synth.h"

namespace concealhunt::harness {

using ConfigMap = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment. Throws ConfigError on a
// malformed line or a repeated key.
ConfigMap ParseConfig(std::istream& in);
ConfigMap ReadConfigFile(const std::filesystem::path& path);

// Every recognised key, synthesis keys first.
std::vector<std::string> ConfigKeys();

// Throws ConfigError for an unknown key or a value that does not parse.
void ApplyConfig(const ConfigMap& config, SynthConfig& synth,
                 ProtocolParams& protocol);
ConfigMap ToConfigMap(const SynthConfig& synth, const ProtocolParams& protocol);
void WriteConfigFile(const std::filesystem::path& path, const ConfigMap& config);

}  // namespace concealhunt::harness

#endif  // CONCEALHUNT_CONFIG_H_
