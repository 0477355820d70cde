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

#include "concealhunt/pipeline.h"

#include <chrono>
#include <fstream>

#include "concealhunt/error.h"
#include "concealhunt/io.h"
#include "concealhunt/sanitizer.h"

namespace concealhunt::harness {

using nlohmann::json;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void ValidateProtocolParams(const ProtocolParams& p) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!IsSupportedKeySize(p.str.key_bits)) {
    fail("key_bits must be 512, 1024 or 2048");
  }
  if (!IsSupportedKeySize(p.sti.group_bits)) {
    fail("group_bits must be 512, 1024 or 2048");
  }
  if (!(p.str.theta > 0.0 && p.str.theta <= 1.0)) fail("theta must be in (0, 1]");
  const sti::MiningParams& m = p.sti.mining;
  if (!(m.min_support > 0.0 && m.min_support <= 1.0)) {
    fail("min_support must be in (0, 1]");
  }
  if (!(m.min_closure > 0.0 && m.min_closure <= 1.0)) {
    fail("min_closure must be in (0, 1]");
  }
  if (m.max_size == 0) fail("max_size must be positive");
}

std::vector<RealThreatGroup> PipelineResult::FinalGroups() const {
  std::vector<RealThreatGroup> out;
  for (const sti::VcOutcome& o : sti) {
    out.insert(out.end(), o.vc.groups.begin(), o.vc.groups.end());
  }
  return out;
}

std::vector<cti::ThreatCategorySeed> CategoriesFromTruth(const GroundTruth& truth) {
  std::vector<cti::ThreatCategorySeed> out;
  for (const auto& [t, services] : truth.topic_vocabulary) {
    out.push_back({"category-" + std::to_string(t), services,
                   "countermeasures/category-" + std::to_string(t)});
  }
  return out;
}

PipelineResult RunPipeline(const Dataset& ds, const ProtocolParams& params) {
  ValidateProtocolParams(params);
  PipelineResult r;
  Stopwatch total;

  Stopwatch sw;
  for (const EventLog& log : ds.logs) {
    auto it = ds.policies.find(log.gateway.pseudonym);
    const SanitizePolicy policy =
        it == ds.policies.end() ? SanitizePolicy{} : it->second;
    r.sanitized.push_back(Sanitize(log, ds.taxonomy, policy));
  }
  r.stats = BuildCorpusStats(r.sanitized);
  r.timing.push_back({"sanitize", sw.Seconds()});

  sw = Stopwatch();
  std::vector<str::Participant> participants;
  std::vector<sti::Member> members;
  std::vector<GatewayId> ids;
  for (const SanitizedLog& log : r.sanitized) {
    Rng box_rng = Rng::Derive(params.seed, "box/" + log.gateway.pseudonym);
    const BoxKeypair box = GenerateBoxKeypair(box_rng);
    const EventVector v = BuildEventVector(log, r.stats, params.sti.base);
    participants.push_back({log.gateway, v.Support(), box});
    members.push_back({log.gateway, log, box});
    ids.push_back(log.gateway);
  }
  r.timing.push_back({"weights", sw.Seconds()});

  const std::vector<cti::ThreatCategorySeed> categories =
      CategoriesFromTruth(ds.truth);
  r.session = cti::HuntSession::Initiate(categories, ids, params.seed, &ds.taxonomy);
  cti::HuntSession& session = *r.session;

  try {
    session.Advance(cti::Phase::kStr);
    sw = Stopwatch();
    r.str = str::Run(participants, params.str, params.seed, session);
    r.timing.push_back({"str", sw.Seconds()});

    session.Advance(cti::Phase::kSti);
    sw = Stopwatch();
    const sti::Vocabulary vocab(ds.taxonomy.Nodes());
    r.sti = sti::Run(r.str->groups, members, r.stats, vocab, params.sti,
                     params.seed, session);
    r.timing.push_back({"sti", sw.Seconds()});

    session.Advance(cti::Phase::kPublish);
    sw = Stopwatch();
    std::vector<VirtualThreatGroup> stored;
    for (const sti::VcOutcome& o : r.sti) stored.push_back(o.vc);
    session.StoreGroups(std::move(stored));
    r.catalog = session.PublishCatalog();
    session.Advance(cti::Phase::kDone);
    r.timing.push_back({"publish", sw.Seconds()});
    r.complete = true;
  } catch (const ProtocolAbort& e) {
    r.abort_reason = e.what();
  }
  r.timing.push_back({"total", total.Seconds()});
  return r;
}

json GroupsJson(const PipelineResult& r) {
  json vcs = json::array();
  for (const sti::VcOutcome& o : r.sti) {
    json real = json::array();
    for (const sti::HierarchyNode& n : o.forest) {
      const std::string parent =
          n.parent ? o.forest[*n.parent].group.Id() : std::string();
      real.push_back(sti::GroupToJson(n.group, parent));
    }
    json members = json::array();
    for (const GatewayId& m : o.vc.members) members.push_back(m.pseudonym);
    vcs.push_back({{"trusted_node", o.vc.trusted_node.pseudonym},
                   {"members", members},
                   {"real_groups", real}});
  }
  json out = {{"complete", r.complete}, {"virtual_groups", vcs}};
  if (r.session) out["session_id"] = r.session->session_id();
  if (!r.complete) out["abort_reason"] = r.abort_reason;
  if (r.str && r.sti.empty()) {
    // STR finished but STI did not: keep the virtual groups.
    json partial = json::array();
    for (const VirtualThreatGroup& vc : r.str->groups) {
      json members = json::array();
      for (const GatewayId& m : vc.members) members.push_back(m.pseudonym);
      partial.push_back({{"trusted_node", vc.trusted_node.pseudonym},
                         {"members", members}});
    }
    out["str_virtual_groups"] = partial;
  }
  return out;
}

void WriteOutputs(const std::filesystem::path& dir, const PipelineResult& r) {
  std::filesystem::create_directories(dir);
  WriteJson(dir / "groups.json", GroupsJson(r));
  if (r.session) {
    json session = r.session->ExportSession();
    session["complete"] = r.complete;
    WriteJson(dir / "session.json", session);
    r.session->WriteTranscript(dir / "transcript.jsonl");
  }
  std::ofstream t(dir / "timing.csv");
  if (!t) throw Error("cannot write timing.csv");
  t << "phase,seconds\n";
  for (const PhaseTiming& p : r.timing) t << p.phase << ',' << p.seconds << '\n';
}

}  // namespace concealhunt::harness
