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

#include "concealhunt/sti_protocol.h"

#include <algorithm>

#include "concealhunt/canonical.h"
#include "concealhunt/error.h"

namespace concealhunt::sti {

using nlohmann::json;

namespace {

constexpr uint8_t kProfileRecord = 'P';

struct Party {
  const Member* member = nullptr;
  Rng rng{0};
  RingMember ring;
  std::vector<Transaction> transactions;
};

json Sealed(Channel& channel, const std::string& step, Party& from,
            const Party& to, const json& payload) {
  const std::string text = payload.dump();
  const Bytes bytes(text.begin(), text.end());
  Envelope env = EnvelopeSeal(bytes, to.member->id, to.member->box.public_key,
                              from.rng);
  const json seen = channel.Deliver(
      {"sti", step, from.member->id.pseudonym, to.member->id.pseudonym,
       ToJson(env)});
  const Bytes opened =
      EnvelopeOpen(EnvelopeFromJson(seen, to.member->id), to.member->box);
  try {
    return json::parse(opened.begin(), opened.end());
  } catch (const json::exception& e) {
    throw ProtocolAbort(std::string("malformed sealed payload: ") + e.what());
  }
}

json ItemsetsToJson(const std::vector<Itemset>& sets) {
  json arr = json::array();
  for (const Itemset& s : sets) arr.push_back(s);
  return arr;
}

std::vector<Itemset> ItemsetsFromJson(const json& j) {
  std::vector<Itemset> out;
  for (const json& s : j) out.push_back(s.get<Itemset>());
  return out;
}

Bytes EncodeProfile(const MemberProfile& p, const Vocabulary& vocab) {
  Encoder e;
  e.PutU8(kProfileRecord);
  e.PutU32(static_cast<uint32_t>(p.groups.size()));
  for (uint32_t g : p.groups) e.PutU32(g);
  std::vector<uint64_t> ids;
  for (const Token& t : p.events) ids.push_back(vocab.Id(t));
  std::sort(ids.begin(), ids.end());
  e.PutU32(static_cast<uint32_t>(ids.size()));
  for (uint64_t id : ids) e.PutU64(id);
  return e.Take();
}

MemberProfile DecodeProfile(std::span<const uint8_t> bytes,
                            const Vocabulary& vocab) {
  MemberProfile p;
  try {
    Decoder d(bytes);
    if (d.GetU8() != kProfileRecord) throw ProtocolAbort("not a profile record");
    for (uint32_t n = d.GetU32(); n > 0; --n) p.groups.insert(d.GetU32());
    for (uint32_t n = d.GetU32(); n > 0; --n) p.events.insert(vocab.Label(d.GetU64()));
    d.ExpectEnd();
  } catch (const InvariantError& e) {
    throw ProtocolAbort(std::string("malformed profile record: ") + e.what());
  }
  return p;
}

// One collect + peel round; returns the plaintext records at the trusted
// node in the order they arrived.
std::vector<Bytes> Round(std::vector<Party>& parties, size_t trusted,
                         const std::vector<std::vector<Bytes>>& records,
                         const CommutativeGroup& group, Channel& channel,
                         const std::string& step) {
  std::vector<RingMember> ring;
  for (const Party& p : parties) ring.push_back(p.ring);
  const std::vector<EncryptedList> collected = RingCollect(
      ring, parties[trusted].member->id, records, group, channel, step);
  const EncryptedList bundle =
      PeelRound(ring, ring[trusted], collected, channel, step);
  return FinalPeel(ring[trusted].key, bundle, group);
}

}  // namespace

json GroupToJson(const RealThreatGroup& g, const std::string& parent,
                 const SupportMap& rc_support) {
  json events = json::array();
  for (const Token& t : g.events) {
    events.push_back({{"digest", TokenDigestHex(t)}, {"label", t}});
  }
  json members = json::array();
  for (const GatewayId& m : g.members) members.push_back(m.pseudonym);
  json support = json::object();
  for (const Token& t : g.events) {
    auto it = rc_support.find(t);
    if (it != rc_support.end()) support[TokenDigestHex(t)] = it->second;
  }
  return {{"id", g.Id()},
          {"events", events},
          {"members", members},
          {"core_point", {{"digest", TokenDigestHex(g.core_point)},
                          {"label", g.core_point}}},
          {"level", g.level},
          {"rc_support", support},
          {"parent", parent.empty() ? json(nullptr) : json(parent)}};
}

VcOutcome RunVirtualGroup(const VirtualThreatGroup& vc,
                          std::span<const Member> members,
                          const CorpusStats& stats, const Vocabulary& vocab,
                          const Params& params, uint64_t seed,
                          Channel& channel) {
  if (vc.members.empty()) throw InvariantError("virtual group has no members");
  if (!vc.members.count(vc.trusted_node)) {
    throw InvariantError("virtual group: trusted node is not a member");
  }
  const CommutativeGroup& cgroup = CommutativeGroup::ForBits(params.group_bits);

  // Ring order P_1..P_n follows the gateway index.
  std::vector<const Member*> ordered;
  for (const GatewayId& id : vc.members) {
    auto it = std::find_if(members.begin(), members.end(),
                           [&](const Member& m) { return m.id == id; });
    if (it == members.end()) {
      throw InvariantError("no log for virtual group member " + id.pseudonym);
    }
    ordered.push_back(&*it);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Member* a, const Member* b) { return a->id.index < b->id.index; });

  const std::string label = "sti/" + vc.trusted_node.pseudonym;
  std::vector<Party> parties(ordered.size());
  size_t t_index = 0;
  for (size_t i = 0; i < ordered.size(); ++i) {
    Party& p = parties[i];
    p.member = ordered[i];
    p.rng = Rng::Derive(seed, label + "/" + p.member->id.pseudonym);
    p.transactions = BucketTransactions(p.member->log.records);
    if (p.member->id == vc.trusted_node) t_index = i;
  }
  // Keys are drawn after every generator exists so that RingMember can point
  // into the stable vector.
  for (Party& p : parties) {
    p.ring = {p.member->id, GenerateCommutativeKey(cgroup, p.rng), &p.rng};
  }
  Party& trusted = parties[t_index];
  auto broadcast = [&](const std::string& step, const json& payload) {
    std::vector<json> received(parties.size());
    for (size_t i = 0; i < parties.size(); ++i) {
      received[i] = i == t_index ? payload
                                 : Sealed(channel, step, trusted, parties[i], payload);
    }
    return received;
  };

  VcOutcome out;

  // Round 1: locally frequent sets; their union is the candidate set.
  std::vector<std::vector<Bytes>> records(parties.size());
  for (size_t i = 0; i < parties.size(); ++i) {
    const std::set<Token> own = TokenSet(parties[i].member->log.records);
    for (const FrequentEventSet& s :
         LocalFrequentEvents(parties[i].transactions, own, params.mining)) {
      records[i].push_back(
          EncodeCatalogRecord(kLocalRecord, s.events, s.support, s.closure, vocab));
    }
  }
  std::set<Itemset> candidate_set;
  for (const Bytes& b : Round(parties, t_index, records, cgroup, channel, "sti.r1")) {
    const CatalogRecord r = DecodeCatalogRecord(b, vocab);
    if (r.tag != kLocalRecord) throw ProtocolAbort("unexpected record in round 1");
    candidate_set.insert(r.itemset);
  }
  std::vector<Itemset> candidates(candidate_set.begin(), candidate_set.end());
  std::sort(candidates.begin(), candidates.end(), ItemsetLess);
  out.candidate_count = candidates.size();

  // Round 2: every member's count and closure for every candidate.
  const std::vector<json> cand_msgs =
      broadcast("sti.candidates", ItemsetsToJson(candidates));
  for (size_t i = 0; i < parties.size(); ++i) {
    const std::vector<Itemset> mine = ItemsetsFromJson(cand_msgs[i]);
    std::set<Token> closure_events;
    for (const Itemset& s : mine) closure_events.insert(s.begin(), s.end());
    records[i].clear();
    records[i].push_back(EncodeCatalogRecord(
        kCountRecord, {}, parties[i].transactions.size(), {}, vocab));
    for (const Itemset& s : mine) {
      const FrequentEventSet c = CountItemset(parties[i].transactions, s,
                                              closure_events,
                                              params.mining.min_closure);
      records[i].push_back(
          EncodeCatalogRecord(kCountRecord, s, c.support, c.closure, vocab));
    }
  }
  std::vector<CatalogRecord> counts;
  for (const Bytes& b : Round(parties, t_index, records, cgroup, channel, "sti.r2")) {
    counts.push_back(DecodeCatalogRecord(b, vocab));
    if (counts.back().tag != kCountRecord) {
      throw ProtocolAbort("unexpected record in round 2");
    }
  }
  out.catalog = AggregateCounts(counts, params.mining.min_support);

  std::vector<RealThreatGroup> groups = InitRealGroups(out.catalog);
  if (groups.empty()) {
    // Nothing reached min_support: the best supported single event forms the
    // only group.
    const GlobalCatalog all = AggregateCounts(counts, 0.0);
    const FrequentEventSet* best = nullptr;
    for (const FrequentEventSet& s : all.sets) {
      if (s.events.size() == 1 && s.support > 0 &&
          (!best || s.support > best->support)) {
        best = &s;
      }
    }
    if (!best) throw ProtocolAbort("virtual group has no event to mine");
    out.fallback = true;
    out.catalog.sets = {*best};
    groups = InitRealGroups(out.catalog);
  }
  out.initial_groups = groups;
  std::set<Token> frequent;
  for (const FrequentEventSet& s : out.catalog.sets) {
    frequent.insert(s.events.begin(), s.events.end());
  }

  // Round 3: unattributed profiles give the support fractions.
  json group_payload = {{"groups", json::array()}, {"frequent", frequent}};
  for (const RealThreatGroup& g : groups) group_payload["groups"].push_back(g.events);
  const std::vector<json> group_msgs = broadcast("sti.groups", group_payload);
  for (size_t i = 0; i < parties.size(); ++i) {
    std::vector<RealThreatGroup> seen;
    for (const json& e : group_msgs[i]["groups"]) {
      seen.push_back({e.get<std::set<Token>>(), {}, {}, 0});
    }
    const MemberProfile p =
        BuildProfile(TokenSet(parties[i].member->log.records), seen,
                     group_msgs[i]["frequent"].get<std::set<Token>>());
    records[i] = {EncodeProfile(p, vocab)};
  }
  std::vector<MemberProfile> profiles;
  for (const Bytes& b : Round(parties, t_index, records, cgroup, channel, "sti.r3")) {
    profiles.push_back(DecodeProfile(b, vocab));
  }
  const Supports supports = ComputeSupports(profiles, groups.size(), frequent);

  json support_payload = {{"rc", json::array()}, {"vc", supports.vc}};
  for (const SupportMap& m : supports.rc) support_payload["rc"].push_back(m);
  const std::vector<json> support_msgs = broadcast("sti.supports", support_payload);

  // Members score locally and report their choice with their histogram.
  std::map<GatewayId, size_t> assignment;
  GroupContext ctx;
  ctx.stats = stats;
  ctx.base = params.base;
  ctx.vc_support = supports.vc;
  for (size_t i = 0; i < parties.size(); ++i) {
    Supports local;
    local.vc = support_msgs[i]["vc"].get<SupportMap>();
    for (const json& m : support_msgs[i]["rc"]) local.rc.push_back(m.get<SupportMap>());
    const EventVector v =
        BuildEventVector(parties[i].member->log, stats, params.base);
    const size_t choice = ChooseGroup(groups, v, local);
    json choice_payload = {
        {"group", choice},
        {"histogram", TokenCounts(parties[i].member->log.records)}};
    if (i != t_index) {
      choice_payload = Sealed(channel, "sti.choice", parties[i], trusted, choice_payload);
    }
    const size_t g = choice_payload["group"].get<size_t>();
    assignment[parties[i].member->id] = g;
    ctx.histograms[parties[i].member->id] =
        choice_payload["histogram"].get<Histogram>();
  }

  std::vector<RealThreatGroup> assigned =
      ApplyAssignment(groups, assignment, ctx.histograms);
  out.forest = MergeGroups(BuildHierarchy(std::move(assigned), ctx),
                           params.merge, ctx, &out.merges);

  out.vc.members = vc.members;
  out.vc.trusted_node = vc.trusted_node;
  json final_groups = json::array();
  for (const HierarchyNode& n : out.forest) {
    const std::string parent =
        n.parent ? out.forest[*n.parent].group.Id() : std::string();
    if (!parent.empty()) out.parents[n.group.Id()] = parent;
    out.vc.groups.push_back(n.group);
    final_groups.push_back(GroupToJson(n.group, parent, RcSupport(n.group, ctx)));
  }
  Validate(out.vc);
  channel.Deliver({"sti", "sti.final_groups", vc.trusted_node.pseudonym,
                   kCtiAddress,
                   {{"trusted_node", vc.trusted_node.pseudonym},
                    {"groups", final_groups}}});
  return out;
}

std::vector<VcOutcome> Run(std::span<const VirtualThreatGroup> vcs,
                           std::span<const Member> members,
                           const CorpusStats& stats, const Vocabulary& vocab,
                           const Params& params, uint64_t seed,
                           Channel& channel) {
  std::vector<VcOutcome> out;
  for (const VirtualThreatGroup& vc : vcs) {
    out.push_back(
        RunVirtualGroup(vc, members, stats, vocab, params, seed, channel));
  }
  return out;
}

}  // namespace concealhunt::sti
