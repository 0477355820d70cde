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

#include "concealhunt/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "concealhunt/error.h"

namespace concealhunt::harness {

namespace {

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseUnsigned(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double d = 0.0;
  in >> d;
  if (!in || in.peek() != std::char_traits<char>::eof()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return d;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

// Shortest decimal form that reads back to the same double.
std::string Num(double d) {
  std::string s;
  for (int precision = 6; precision <= 17; ++precision) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(precision);
    out << d;
    s = out.str();
    if (std::stod(s) == d) break;
  }
  return s;
}

std::string BaseName(LogBase b) {
  switch (b) {
    case LogBase::kE:
      return "e";
    case LogBase::k2:
      return "2";
    case LogBase::k10:
      return "10";
  }
  return "e";
}

struct Key {
  std::string name;
  std::function<void(const std::string&, SynthConfig&, ProtocolParams&)> set;
  std::function<std::string(const SynthConfig&, const ProtocolParams&)> get;
};

#define CH_UINT(NAME, TYPE, FIELD)                                            \
  Key {                                                                       \
    NAME,                                                                     \
        [](const std::string& v, SynthConfig& s, ProtocolParams& p) {         \
          (void)s;                                                            \
          (void)p;                                                            \
          FIELD = ParseUnsigned<TYPE>(NAME, v);                               \
        },                                                                    \
        [](const SynthConfig& s, const ProtocolParams& p) {                   \
          (void)s;                                                            \
          (void)p;                                                            \
          return std::to_string(FIELD);                                       \
        }                                                                     \
  }

#define CH_REAL(NAME, FIELD)                                                  \
  Key {                                                                       \
    NAME,                                                                     \
        [](const std::string& v, SynthConfig& s, ProtocolParams& p) {         \
          (void)s;                                                            \
          (void)p;                                                            \
          FIELD = ParseDouble(NAME, v);                                       \
        },                                                                    \
        [](const SynthConfig& s, const ProtocolParams& p) {                   \
          (void)s;                                                            \
          (void)p;                                                            \
          return Num(FIELD);                                                  \
        }                                                                     \
  }

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = {
      CH_UINT("num_gateways", uint32_t, s.num_gateways),
      CH_UINT("num_devices", uint32_t, s.num_devices),
      CH_UINT("num_threat_services", uint32_t, s.num_threat_services),
      CH_UINT("actions_per_service", uint32_t, s.actions_per_service),
      CH_UINT("days", uint32_t, s.days),
      CH_UINT("events_per_day", uint32_t, s.events_per_day),
      CH_UINT("planted_topics", uint32_t, s.planted_topics),
      CH_UINT("topic_services", uint32_t, s.topic_services),
      CH_REAL("dominance", s.dominance),
      CH_REAL("sensitive_fraction", s.sensitive_fraction),
      CH_REAL("leak_fraction", s.leak_fraction),
      CH_UINT("sanitize_depth", int, s.sanitize_depth),
      CH_UINT("rng_seed", uint64_t, s.rng_seed),
      CH_UINT("key_bits", unsigned, p.str.key_bits),
      CH_REAL("theta", p.str.theta),
      CH_UINT("max_groups", size_t, p.str.max_groups),
      CH_UINT("group_bits", unsigned, p.sti.group_bits),
      CH_REAL("min_support", p.sti.mining.min_support),
      CH_REAL("min_closure", p.sti.mining.min_closure),
      CH_UINT("max_size", size_t, p.sti.mining.max_size),
      CH_REAL("merge_threshold", p.sti.merge.threshold),
      Key{"cohesion_prune",
          [](const std::string& v, SynthConfig&, ProtocolParams& p) {
            p.sti.merge.cohesion_prune = ParseBool("cohesion_prune", v);
          },
          [](const SynthConfig&, const ProtocolParams& p) {
            return std::string(p.sti.merge.cohesion_prune ? "true" : "false");
          }},
      CH_REAL("prune_threshold", p.sti.merge.prune_threshold),
      Key{"log_base",
          [](const std::string& v, SynthConfig&, ProtocolParams& p) {
            try {
              p.sti.base = ParseLogBase(v);
            } catch (const Error& e) {
              throw ConfigError(std::string("log_base: ") + e.what());
            }
          },
          [](const SynthConfig&, const ProtocolParams& p) {
            return BaseName(p.sti.base);
          }},
      CH_UINT("seed", uint64_t, p.seed),
  };
  return keys;
}

#undef CH_UINT
#undef CH_REAL

}  // namespace

ConfigMap ParseConfig(std::istream& in) {
  ConfigMap out;
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(n) + ": expected key=value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(n) + ": empty key");
    }
    if (!out.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(n) + ": repeated key " + key);
    }
  }
  return out;
}

ConfigMap ReadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return ParseConfig(in);
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> out;
  for (const Key& k : Keys()) out.push_back(k.name);
  return out;
}

void ApplyConfig(const ConfigMap& config, SynthConfig& synth,
                 ProtocolParams& protocol) {
  for (const auto& [name, value] : config) {
    const Key* key = nullptr;
    for (const Key& k : Keys()) {
      if (k.name == name) key = &k;
    }
    if (!key) throw ConfigError("unknown config key '" + name + "'");
    key->set(value, synth, protocol);
  }
}

ConfigMap ToConfigMap(const SynthConfig& synth, const ProtocolParams& protocol) {
  ConfigMap out;
  for (const Key& k : Keys()) out[k.name] = k.get(synth, protocol);
  return out;
}

void WriteConfigFile(const std::filesystem::path& path, const ConfigMap& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const std::string& k : ConfigKeys()) {
    auto it = config.find(k);
    if (it != config.end()) out << k << " = " << it->second << '\n';
  }
}

}  // namespace concealhunt::harness
