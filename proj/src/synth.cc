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

#include "concealhunt/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "concealhunt/error.h"
#include "concealhunt/io.h"

namespace concealhunt::harness {

using nlohmann::json;

namespace {

std::string Name(const char* prefix, uint32_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02u", prefix, n);
  return buf;
}

std::string DeviceToken(uint32_t d) { return Name("dev", d); }

std::string ServiceToken(const SynthConfig& c, uint32_t s) {
  return DeviceToken(s % c.num_devices) + "." + Name("svc", s);
}

std::string ActionToken(const SynthConfig& c, uint32_t s, uint32_t a) {
  return ServiceToken(c, s) + "." + Name("act", a);
}

size_t ShareOf(double fraction, size_t n) {
  if (fraction <= 0.0 || n == 0) return 0;
  return std::min(n, static_cast<size_t>(std::ceil(fraction * n - 1e-9)));
}

}  // namespace

void ValidateSynthConfig(const SynthConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.num_gateways < 3) fail("num_gateways must be at least 3");
  if (c.num_devices == 0) fail("num_devices must be positive");
  if (c.num_threat_services == 0) fail("num_threat_services must be positive");
  if (c.actions_per_service == 0) fail("actions_per_service must be positive");
  if (c.days == 0) fail("days must be positive");
  if (c.events_per_day == 0) fail("events_per_day must be positive");
  if (c.planted_topics == 0) fail("planted_topics must be positive");
  if (c.planted_topics > c.num_gateways) {
    fail("planted_topics exceeds num_gateways");
  }
  if (c.topic_services == 0) fail("topic_services must be positive");
  if (static_cast<uint64_t>(c.planted_topics) * c.topic_services >
      c.num_threat_services) {
    fail("planted_topics * topic_services exceeds num_threat_services");
  }
  if (!(c.dominance > 0.0 && c.dominance <= 1.0)) {
    fail("dominance must be in (0, 1]");
  }
  if (!(c.sensitive_fraction >= 0.0 && c.sensitive_fraction <= 1.0)) {
    fail("sensitive_fraction must be in [0, 1]");
  }
  if (!(c.leak_fraction >= 0.0 && c.leak_fraction <= 1.0)) {
    fail("leak_fraction must be in [0, 1]");
  }
  if (c.sanitize_depth < 0 || c.sanitize_depth > 3) {
    fail("sanitize_depth must be in [0, 3]");
  }
}

Dataset Synthesize(const SynthConfig& c) {
  ValidateSynthConfig(c);
  Dataset ds;
  Rng rng = Rng::Derive(c.rng_seed, "synth");

  std::vector<std::pair<Token, Token>> pairs{{"root", "root"}};
  for (uint32_t d = 0; d < c.num_devices; ++d) {
    pairs.emplace_back(DeviceToken(d), "root");
  }
  for (uint32_t s = 0; s < c.num_threat_services; ++s) {
    pairs.emplace_back(ServiceToken(c, s), DeviceToken(s % c.num_devices));
    for (uint32_t a = 0; a < c.actions_per_service; ++a) {
      pairs.emplace_back(ActionToken(c, s, a), ServiceToken(c, s));
    }
  }
  ds.taxonomy = TaxonomyTree::FromPairs(pairs);

  std::vector<uint32_t> background;
  for (uint32_t s = c.planted_topics * c.topic_services;
       s < c.num_threat_services; ++s) {
    background.push_back(s);
  }
  std::map<uint32_t, std::vector<Token>> topic_sensitive;
  for (uint32_t t = 0; t < c.planted_topics; ++t) {
    std::vector<Token> actions;
    for (uint32_t k = 0; k < c.topic_services; ++k) {
      const uint32_t s = t * c.topic_services + k;
      ds.truth.topic_vocabulary[t].insert(ServiceToken(c, s));
      for (uint32_t a = 0; a < c.actions_per_service; ++a) {
        actions.push_back(ActionToken(c, s, a));
      }
    }
    rng.Shuffle(actions);
    actions.resize(ShareOf(c.sensitive_fraction, actions.size()));
    std::sort(actions.begin(), actions.end());
    topic_sensitive[t] = actions;
    ds.truth.sensitive.insert(actions.begin(), actions.end());
  }

  const uint32_t topic_events = static_cast<uint32_t>(
      std::ceil(c.dominance * c.events_per_day - 1e-9));
  for (uint32_t g = 0; g < c.num_gateways; ++g) {
    const uint32_t topic = g % c.planted_topics;
    EventLog log;
    log.gateway = {NewPseudonym(rng), g};
    ds.truth.topic_of[log.gateway.pseudonym] = topic;

    for (uint32_t day = 0; day < c.days; ++day) {
      for (uint32_t e = 0; e < c.events_per_day; ++e) {
        uint32_t s;
        if (e < topic_events || background.empty()) {
          s = topic * c.topic_services +
              static_cast<uint32_t>(rng.Below(c.topic_services));
        } else {
          s = background[rng.Below(background.size())];
        }
        const uint32_t a = static_cast<uint32_t>(rng.Below(c.actions_per_service));
        Event ev;
        ev.event_id = ActionToken(c, s, a);
        ev.device_id = DeviceToken(s % c.num_devices);
        ev.timestamp = static_cast<int64_t>(day) * 86400 +
                       static_cast<int64_t>(rng.Below(86400));
        log.records.push_back(std::move(ev));
      }
    }
    std::stable_sort(log.records.begin(), log.records.end(),
                     [](const Event& a, const Event& b) {
                       return a.timestamp < b.timestamp;
                     });

    std::vector<Token> own = topic_sensitive[topic];
    rng.Shuffle(own);
    own.resize(ShareOf(c.leak_fraction, own.size()));
    std::set<Token> leaked(own.begin(), own.end());
    if (!leaked.empty()) ds.truth.leaked[log.gateway.pseudonym] = leaked;

    SanitizePolicy policy;
    policy.default_depth = c.sanitize_depth;
    for (const Token& t : ds.truth.sensitive) {
      if (!leaked.count(t)) policy.sensitive_events.insert(t);
    }
    ds.policies[log.gateway.pseudonym] = std::move(policy);
    ds.logs.push_back(std::move(log));
  }
  return ds;
}

json TruthToJson(const GroundTruth& truth) {
  json topics = json::object();
  for (const auto& [t, v] : truth.topic_vocabulary) topics[std::to_string(t)] = v;
  return {{"topic_of", truth.topic_of},
          {"topics", topics},
          {"sensitive", truth.sensitive},
          {"leaked", truth.leaked}};
}

GroundTruth TruthFromJson(const json& j) {
  try {
    GroundTruth t;
    t.topic_of = j.at("topic_of").get<std::map<std::string, uint32_t>>();
    for (const auto& [k, v] : j.at("topics").items()) {
      t.topic_vocabulary[static_cast<uint32_t>(std::stoul(k))] =
          v.get<std::set<Token>>();
    }
    t.sensitive = j.value("sensitive", std::set<Token>{});
    t.leaked = j.value("leaked", std::map<std::string, std::set<Token>>{});
    return t;
  } catch (const std::exception& e) {
    throw InvariantError(std::string("malformed ground truth: ") + e.what());
  }
}

void WriteDataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  WriteEventLogs(dir / "logs.jsonl", ds.logs);
  WriteTaxonomy(dir / "taxonomy.tsv", ds.taxonomy);
  json policies = json::object();
  for (const auto& [p, policy] : ds.policies) policies[p] = PolicyToJson(policy);
  WriteJson(dir / "policies.json", policies);
  WriteJson(dir / "truth.json", TruthToJson(ds.truth));
}

Dataset ReadDataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.logs = ReadEventLogs(dir / "logs.jsonl");
  ds.taxonomy = ReadTaxonomy(dir / "taxonomy.tsv");
  if (std::filesystem::exists(dir / "policies.json")) {
    const json policies = ReadJson(dir / "policies.json");
    for (const auto& [p, j] : policies.items()) {
      ds.policies[p] = PolicyFromJson(j);
    }
  }
  if (std::filesystem::exists(dir / "truth.json")) {
    ds.truth = TruthFromJson(ReadJson(dir / "truth.json"));
  }
  return ds;
}

}  // namespace concealhunt::harness
