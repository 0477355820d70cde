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

#ifndef CONCEALHUNT_STI_GROUPS_H_
#define CONCEALHUNT_STI_GROUPS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "concealhunt/core_model.h"
#include "concealhunt/mining.h"
#include "concealhunt/weighting.h"

namespace concealhunt::sti {

using SupportMap = std::map<Token, double>;
using Histogram = std::map<Token, uint64_t>;

// One group per maximal run of catalog sets sharing their first token when
// each set is read as its sorted token-id sequence. Members are left empty;
// the core point is the defining event with the highest global 1-support.
std::vector<RealThreatGroup> InitRealGroups(const GlobalCatalog& catalog);

// V_sg = every log containing all defining events.
void AttachMembers(std::vector<RealThreatGroup>& groups,
                   std::span<const SanitizedLog> logs);

// What a member contributes to the support round: the indices of the initial
// groups whose defining events it holds and the frequent events it holds.
struct MemberProfile {
  std::set<uint32_t> groups;
  std::set<Token> events;

  friend bool operator==(const MemberProfile&, const MemberProfile&) = default;
};

MemberProfile BuildProfile(const std::set<Token>& log_tokens,
                           std::span<const RealThreatGroup> groups,
                           const std::set<Token>& frequent_events);

struct Supports {
  std::vector<SupportMap> rc;  // per initial group
  SupportMap vc;               // keyed by the frequent events
};

// rc[g][w]: share of the profiles qualifying for g that hold w.
// vc[w]: share of all profiles that hold w.
Supports ComputeSupports(std::span<const MemberProfile> profiles,
                         size_t group_count,
                         const std::set<Token>& frequent_events);

struct ScoreBreakdown {
  double positive_terms = 0.0;
  double negative_terms = 0.0;
  double score = 0.0;
};

// positive: sum of e(w) * rc(w) over weighted events in group_events.
// negative: sum of e(w) * vc(w) over weighted events outside group_events
// that are keys of vc.
ScoreBreakdown SimilarityScore(const std::set<Token>& group_events,
                               const std::map<Token, double>& weights,
                               const SupportMap& rc_support,
                               const SupportMap& vc_support);
ScoreBreakdown SimilarityScore(const RealThreatGroup& group,
                               const EventVector& vector,
                               const SupportMap& rc_support,
                               const SupportMap& vc_support);

// Argmax of the score; ties go to the smaller group identifier.
size_t ChooseGroup(std::span<const RealThreatGroup> groups,
                   const EventVector& vector, const Supports& supports);

std::map<GatewayId, size_t> AssignMembership(
    std::span<const RealThreatGroup> groups,
    std::span<const EventVector> vectors, const Supports& supports);

// Replaces the members by the assignment, recomputes every core point from
// the members' histograms and drops groups left without members.
std::vector<RealThreatGroup> ApplyAssignment(
    std::vector<RealThreatGroup> groups,
    const std::map<GatewayId, size_t>& assignment,
    const std::map<GatewayId, Histogram>& histograms);

// Most frequent defining event over the members' histograms; ties go to the
// smaller token. Falls back to the current core point when no member holds
// any defining event.
Token RecomputeCorePoint(const RealThreatGroup& group,
                         const std::map<GatewayId, Histogram>& histograms);

// Everything the trusted node holds about one virtual group after the
// choices arrive.
struct GroupContext {
  std::map<GatewayId, Histogram> histograms;
  CorpusStats stats;
  LogBase base = LogBase::kE;
  SupportMap vc_support;
};

GroupContext MakeGroupContext(std::span<const SanitizedLog> member_logs,
                              const CorpusStats& stats,
                              const std::set<Token>& frequent_events,
                              LogBase base = LogBase::kE);

// Share of the group's members whose histogram holds each event.
SupportMap RcSupport(const RealThreatGroup& group, const GroupContext& ctx);
// Concatenation of the members' logs.
Histogram ConceivedLog(const RealThreatGroup& group, const GroupContext& ctx);
std::map<Token, double> ConceivedWeights(const RealThreatGroup& group,
                                         const GroupContext& ctx);

struct HierarchyNode {
  RealThreatGroup group;
  std::optional<size_t> parent;
  std::vector<size_t> children;
};
using Forest = std::vector<HierarchyNode>;

// Nodes are ordered by (level, identifier). The parent of a level-k group is
// the level-(k-1) subset group scoring highest against the child's conceived
// log.
Forest BuildHierarchy(std::vector<RealThreatGroup> groups,
                      const GroupContext& ctx);

// score(RC_i <- conceived log of RC_j) / total weight of I_sg(RC_j) + 1.
// Throws InvariantError when RC_j has an empty conceived log.
double DirectedRcSimilarity(const RealThreatGroup& i,
                            const RealThreatGroup& j,
                            const GroupContext& ctx);
double InterGroupSimilarity(const RealThreatGroup& a,
                            const RealThreatGroup& b,
                            const GroupContext& ctx);

RealThreatGroup MergeTwo(const RealThreatGroup& a, const RealThreatGroup& b,
                         const GroupContext& ctx);

struct MergeParams {
  double threshold = 1.0;
  bool cohesion_prune = false;
  double prune_threshold = 1.0;
};

// Repeatedly merges the sibling pair with the highest similarity at or above
// the threshold, rebuilding the hierarchy after each merge. Groups with
// identical defining events are always merged.
Forest MergeGroups(Forest forest, const MergeParams& params,
                   const GroupContext& ctx, size_t* merges = nullptr);

std::vector<RealThreatGroup> Groups(const Forest& forest);

// Published description of one final group.
struct CatalogEntry {
  std::string group_id;
  std::set<Token> events;
  Token core_point;
  uint32_t level = 0;
  SupportMap rc_support;
  std::string countermeasures;
};

struct Enrollment {
  std::vector<std::pair<std::string, double>> ranking;  // descending
  std::string chosen;
};

// Runs entirely on the newcomer: its vector uses the published corpus stats
// extended by its own log, negative supports are the share of catalog groups
// holding an event. Throws InvariantError on an empty catalog.
Enrollment EnrollNewMember(const SanitizedLog& log,
                           std::span<const CatalogEntry> catalog,
                           const CorpusStats& stats,
                           LogBase base = LogBase::kE);

}  // namespace concealhunt::sti

#endif  // CONCEALHUNT_STI_GROUPS_H_
