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

#include "concealhunt/sti_groups.h"

#include <algorithm>
#include <tuple>

#include "concealhunt/crypto.h"
#include "concealhunt/error.h"

namespace concealhunt::sti {

namespace {

std::vector<uint64_t> SortedIds(const Itemset& s) {
  std::vector<uint64_t> ids;
  for (const Token& t : s) ids.push_back(TokenId(t));
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool IsSubset(const std::set<Token>& small, const std::set<Token>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

double Lookup(const SupportMap& m, const Token& t) {
  auto it = m.find(t);
  return it == m.end() ? 0.0 : it->second;
}

std::map<Token, double> WeightsOf(const Histogram& h, const CorpusStats& stats,
                                  LogBase base) {
  if (h.empty()) return {};
  return BuildEventVector(GatewayId{}, h, stats, base).weights;
}

bool NodeLess(const RealThreatGroup& a, const RealThreatGroup& b) {
  return std::make_tuple(a.level, a.Id()) < std::make_tuple(b.level, b.Id());
}

}  // namespace

std::vector<RealThreatGroup> InitRealGroups(const GlobalCatalog& catalog) {
  std::map<Token, uint64_t> single_support;
  std::vector<std::pair<std::vector<uint64_t>, const FrequentEventSet*>> keyed;
  for (const FrequentEventSet& s : catalog.sets) {
    if (s.events.empty()) continue;
    if (s.events.size() == 1) single_support[*s.events.begin()] = s.support;
    keyed.emplace_back(SortedIds(s.events), &s);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<RealThreatGroup> groups;
  for (size_t i = 0; i < keyed.size();) {
    const uint64_t head = keyed[i].first.front();
    RealThreatGroup g;
    for (; i < keyed.size() && keyed[i].first.front() == head; ++i) {
      g.events.insert(keyed[i].second->events.begin(),
                      keyed[i].second->events.end());
    }
    g.level = static_cast<uint32_t>(g.events.size());
    uint64_t best = 0;
    g.core_point = *g.events.begin();
    for (const Token& t : g.events) {
      auto it = single_support.find(t);
      const uint64_t s = it == single_support.end() ? 0 : it->second;
      if (s > best) {
        best = s;
        g.core_point = t;
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

void AttachMembers(std::vector<RealThreatGroup>& groups,
                   std::span<const SanitizedLog> logs) {
  for (RealThreatGroup& g : groups) {
    g.members.clear();
    for (const SanitizedLog& log : logs) {
      if (IsSubset(g.events, TokenSet(log.records))) {
        g.members.insert(log.gateway);
      }
    }
  }
}

MemberProfile BuildProfile(const std::set<Token>& log_tokens,
                           std::span<const RealThreatGroup> groups,
                           const std::set<Token>& frequent_events) {
  MemberProfile p;
  for (size_t i = 0; i < groups.size(); ++i) {
    if (IsSubset(groups[i].events, log_tokens)) {
      p.groups.insert(static_cast<uint32_t>(i));
    }
  }
  std::set_intersection(log_tokens.begin(), log_tokens.end(),
                        frequent_events.begin(), frequent_events.end(),
                        std::inserter(p.events, p.events.end()));
  return p;
}

Supports ComputeSupports(std::span<const MemberProfile> profiles,
                         size_t group_count,
                         const std::set<Token>& frequent_events) {
  Supports s;
  s.rc.resize(group_count);
  std::vector<size_t> qualifying(group_count, 0);
  std::vector<std::map<Token, size_t>> rc_counts(group_count);
  std::map<Token, size_t> vc_counts;
  for (const MemberProfile& p : profiles) {
    for (const Token& t : p.events) ++vc_counts[t];
    for (uint32_t g : p.groups) {
      if (g >= group_count) throw ProtocolAbort("profile names unknown group");
      ++qualifying[g];
      for (const Token& t : p.events) ++rc_counts[g][t];
    }
  }
  const double n = static_cast<double>(profiles.size());
  for (const Token& t : frequent_events) {
    s.vc[t] = n > 0 ? static_cast<double>(vc_counts[t]) / n : 0.0;
  }
  for (size_t g = 0; g < group_count; ++g) {
    if (qualifying[g] == 0) continue;
    for (const auto& [t, c] : rc_counts[g]) {
      s.rc[g][t] = static_cast<double>(c) / static_cast<double>(qualifying[g]);
    }
  }
  return s;
}

ScoreBreakdown SimilarityScore(const std::set<Token>& group_events,
                               const std::map<Token, double>& weights,
                               const SupportMap& rc_support,
                               const SupportMap& vc_support) {
  ScoreBreakdown b;
  for (const auto& [t, e] : weights) {
    if (group_events.count(t)) {
      b.positive_terms += e * Lookup(rc_support, t);
    } else if (auto it = vc_support.find(t); it != vc_support.end()) {
      b.negative_terms += e * it->second;
    }
  }
  b.score = b.positive_terms - b.negative_terms;
  return b;
}

ScoreBreakdown SimilarityScore(const RealThreatGroup& group,
                               const EventVector& vector,
                               const SupportMap& rc_support,
                               const SupportMap& vc_support) {
  return SimilarityScore(group.events, vector.weights, rc_support, vc_support);
}

size_t ChooseGroup(std::span<const RealThreatGroup> groups,
                   const EventVector& vector, const Supports& supports) {
  if (groups.empty()) throw InvariantError("assignment needs a group");
  if (supports.rc.size() != groups.size()) {
    throw InvariantError("assignment: one support map per group required");
  }
  size_t best = 0;
  double best_score = 0.0;
  std::string best_id;
  for (size_t i = 0; i < groups.size(); ++i) {
    const double s =
        SimilarityScore(groups[i], vector, supports.rc[i], supports.vc).score;
    const std::string id = groups[i].Id();
    if (i == 0 || s > best_score || (s == best_score && id < best_id)) {
      best = i;
      best_score = s;
      best_id = id;
    }
  }
  return best;
}

std::map<GatewayId, size_t> AssignMembership(
    std::span<const RealThreatGroup> groups,
    std::span<const EventVector> vectors, const Supports& supports) {
  std::map<GatewayId, size_t> out;
  for (const EventVector& v : vectors) {
    out[v.owner] = ChooseGroup(groups, v, supports);
  }
  return out;
}

Token RecomputeCorePoint(const RealThreatGroup& group,
                         const std::map<GatewayId, Histogram>& histograms) {
  std::map<Token, uint64_t> totals;
  for (const GatewayId& m : group.members) {
    auto it = histograms.find(m);
    if (it == histograms.end()) continue;
    for (const Token& t : group.events) {
      auto c = it->second.find(t);
      if (c != it->second.end()) totals[t] += c->second;
    }
  }
  Token best =
      group.events.count(group.core_point) ? group.core_point : *group.events.begin();
  uint64_t best_count = 0;
  for (const auto& [t, c] : totals) {
    if (c > best_count) {
      best = t;
      best_count = c;
    }
  }
  return best;
}

std::vector<RealThreatGroup> ApplyAssignment(
    std::vector<RealThreatGroup> groups,
    const std::map<GatewayId, size_t>& assignment,
    const std::map<GatewayId, Histogram>& histograms) {
  for (RealThreatGroup& g : groups) g.members.clear();
  for (const auto& [id, g] : assignment) {
    if (g >= groups.size()) throw ProtocolAbort("choice names unknown group");
    groups[g].members.insert(id);
  }
  std::vector<RealThreatGroup> out;
  for (RealThreatGroup& g : groups) {
    if (g.members.empty()) continue;
    g.core_point = RecomputeCorePoint(g, histograms);
    out.push_back(std::move(g));
  }
  return out;
}

GroupContext MakeGroupContext(std::span<const SanitizedLog> member_logs,
                              const CorpusStats& stats,
                              const std::set<Token>& frequent_events,
                              LogBase base) {
  GroupContext ctx;
  ctx.stats = stats;
  ctx.base = base;
  for (const SanitizedLog& log : member_logs) {
    ctx.histograms[log.gateway] = TokenCounts(log.records);
  }
  const double n = static_cast<double>(member_logs.size());
  for (const Token& t : frequent_events) {
    size_t holders = 0;
    for (const auto& [id, h] : ctx.histograms) holders += h.count(t);
    ctx.vc_support[t] = n > 0 ? static_cast<double>(holders) / n : 0.0;
  }
  return ctx;
}

SupportMap RcSupport(const RealThreatGroup& group, const GroupContext& ctx) {
  std::map<Token, size_t> holders;
  size_t n = 0;
  for (const GatewayId& m : group.members) {
    auto it = ctx.histograms.find(m);
    if (it == ctx.histograms.end()) continue;
    ++n;
    for (const auto& [t, c] : it->second) {
      if (c > 0) ++holders[t];
    }
  }
  SupportMap out;
  for (const auto& [t, c] : holders) {
    out[t] = static_cast<double>(c) / static_cast<double>(n);
  }
  return out;
}

Histogram ConceivedLog(const RealThreatGroup& group, const GroupContext& ctx) {
  Histogram out;
  for (const GatewayId& m : group.members) {
    auto it = ctx.histograms.find(m);
    if (it == ctx.histograms.end()) continue;
    for (const auto& [t, c] : it->second) out[t] += c;
  }
  return out;
}

std::map<Token, double> ConceivedWeights(const RealThreatGroup& group,
                                         const GroupContext& ctx) {
  return WeightsOf(ConceivedLog(group, ctx), ctx.stats, ctx.base);
}

Forest BuildHierarchy(std::vector<RealThreatGroup> groups,
                      const GroupContext& ctx) {
  std::sort(groups.begin(), groups.end(), NodeLess);
  Forest forest;
  forest.reserve(groups.size());
  for (RealThreatGroup& g : groups) forest.push_back({std::move(g), {}, {}});

  std::vector<SupportMap> rc(forest.size());
  for (size_t i = 0; i < forest.size(); ++i) rc[i] = RcSupport(forest[i].group, ctx);

  for (size_t c = 0; c < forest.size(); ++c) {
    const RealThreatGroup& child = forest[c].group;
    if (child.level < 2) continue;
    const std::map<Token, double> weights = ConceivedWeights(child, ctx);
    std::optional<size_t> best;
    double best_score = 0.0;
    for (size_t p = 0; p < forest.size(); ++p) {
      const RealThreatGroup& cand = forest[p].group;
      if (cand.level + 1 != child.level || !IsSubset(cand.events, child.events)) {
        continue;
      }
      const double s =
          SimilarityScore(cand.events, weights, rc[p], ctx.vc_support).score;
      // Candidates are visited in identifier order, so ">" keeps the
      // smaller identifier on ties.
      if (!best || s > best_score) {
        best = p;
        best_score = s;
      }
    }
    if (best) {
      forest[c].parent = best;
      forest[*best].children.push_back(c);
    }
  }
  return forest;
}

double DirectedRcSimilarity(const RealThreatGroup& i, const RealThreatGroup& j,
                            const GroupContext& ctx) {
  const Histogram conceived = ConceivedLog(j, ctx);
  if (conceived.empty()) {
    throw InvariantError("group " + j.Id() + " has an empty conceived log");
  }
  const std::map<Token, double> all = WeightsOf(conceived, ctx.stats, ctx.base);
  std::map<Token, double> weights;
  double mass = 0.0;
  for (const Token& t : j.events) {
    auto it = all.find(t);
    if (it == all.end()) continue;
    weights.insert(*it);
    mass += it->second;
  }
  if (mass <= 0.0) return 1.0;
  const ScoreBreakdown b =
      SimilarityScore(i.events, weights, RcSupport(i, ctx), ctx.vc_support);
  return b.score / mass + 1.0;
}

double InterGroupSimilarity(const RealThreatGroup& a, const RealThreatGroup& b,
                            const GroupContext& ctx) {
  return DirectedRcSimilarity(a, b, ctx) * DirectedRcSimilarity(b, a, ctx);
}

RealThreatGroup MergeTwo(const RealThreatGroup& a, const RealThreatGroup& b,
                         const GroupContext& ctx) {
  RealThreatGroup m;
  m.events = a.events;
  m.events.insert(b.events.begin(), b.events.end());
  m.members = a.members;
  m.members.insert(b.members.begin(), b.members.end());
  m.level = static_cast<uint32_t>(m.events.size());
  m.core_point = a.core_point;
  m.core_point = RecomputeCorePoint(m, ctx.histograms);
  return m;
}

std::vector<RealThreatGroup> Groups(const Forest& forest) {
  std::vector<RealThreatGroup> out;
  out.reserve(forest.size());
  for (const HierarchyNode& n : forest) out.push_back(n.group);
  return out;
}

namespace {

// Folds groups with equal defining events together. Returns true on change.
bool MergeDuplicates(std::vector<RealThreatGroup>& groups,
                     const GroupContext& ctx, size_t& merges) {
  std::map<std::set<Token>, size_t> seen;
  std::vector<RealThreatGroup> out;
  for (RealThreatGroup& g : groups) {
    auto it = seen.find(g.events);
    if (it == seen.end()) {
      seen.emplace(g.events, out.size());
      out.push_back(std::move(g));
    } else {
      out[it->second] = MergeTwo(out[it->second], g, ctx);
      ++merges;
    }
  }
  const bool changed = out.size() != groups.size();
  groups = std::move(out);
  return changed;
}

Forest MergeLoop(Forest forest, double threshold, const GroupContext& ctx,
                 size_t& merges) {
  std::vector<RealThreatGroup> groups = Groups(forest);
  if (MergeDuplicates(groups, ctx, merges)) {
    forest = BuildHierarchy(std::move(groups), ctx);
  }
  while (true) {
    std::optional<std::pair<size_t, size_t>> best;
    double best_sim = 0.0;
    for (size_t a = 0; a < forest.size(); ++a) {
      for (size_t b = a + 1; b < forest.size(); ++b) {
        if (forest[a].parent != forest[b].parent) continue;
        if (forest[a].group.members.empty() || forest[b].group.members.empty()) {
          continue;
        }
        const double s = InterGroupSimilarity(forest[a].group, forest[b].group, ctx);
        if (s >= threshold && (!best || s > best_sim)) {
          best = {a, b};
          best_sim = s;
        }
      }
    }
    if (!best) break;
    groups.clear();
    for (size_t k = 0; k < forest.size(); ++k) {
      if (k != best->first && k != best->second) groups.push_back(forest[k].group);
    }
    groups.push_back(
        MergeTwo(forest[best->first].group, forest[best->second].group, ctx));
    ++merges;
    while (MergeDuplicates(groups, ctx, merges)) {
    }
    forest = BuildHierarchy(std::move(groups), ctx);
  }
  return forest;
}

}  // namespace

Forest MergeGroups(Forest forest, const MergeParams& params,
                   const GroupContext& ctx, size_t* merges) {
  size_t count = 0;
  forest = MergeLoop(std::move(forest), params.threshold, ctx, count);
  if (params.cohesion_prune && forest.size() > 1) {
    std::vector<RealThreatGroup> kept;
    std::vector<GatewayId> orphans;
    for (const HierarchyNode& n : forest) {
      const RealThreatGroup& g = n.group;
      if (!g.members.empty() &&
          InterGroupSimilarity(g, g, ctx) < params.prune_threshold) {
        orphans.insert(orphans.end(), g.members.begin(), g.members.end());
      } else {
        kept.push_back(g);
      }
    }
    if (!orphans.empty() && !kept.empty()) {
      std::vector<SupportMap> rc;
      for (const RealThreatGroup& g : kept) rc.push_back(RcSupport(g, ctx));
      for (const GatewayId& id : orphans) {
        const std::map<Token, double> w =
            WeightsOf(ctx.histograms.at(id), ctx.stats, ctx.base);
        size_t best = 0;
        double best_score = 0.0;
        for (size_t k = 0; k < kept.size(); ++k) {
          const double s =
              SimilarityScore(kept[k].events, w, rc[k], ctx.vc_support).score;
          if (k == 0 || s > best_score) {
            best = k;
            best_score = s;
          }
        }
        kept[best].members.insert(id);
      }
      for (RealThreatGroup& g : kept) {
        g.core_point = RecomputeCorePoint(g, ctx.histograms);
      }
      forest = MergeLoop(BuildHierarchy(std::move(kept), ctx), params.threshold,
                         ctx, count);
    }
  }
  if (merges) *merges = count;
  return forest;
}

Enrollment EnrollNewMember(const SanitizedLog& log,
                           std::span<const CatalogEntry> catalog,
                           const CorpusStats& stats, LogBase base) {
  if (catalog.empty()) throw InvariantError("enrollment: empty catalog");
  CorpusStats extended = stats;
  ++extended.gateway_count;
  for (const Token& t : TokenSet(log.records)) ++extended.log_frequency[t];
  const EventVector v = BuildEventVector(log, extended, base);

  SupportMap holders;
  for (const CatalogEntry& e : catalog) {
    for (const Token& t : e.events) holders[t] += 1.0;
  }
  for (auto& [t, c] : holders) c /= static_cast<double>(catalog.size());

  Enrollment out;
  for (const CatalogEntry& e : catalog) {
    out.ranking.emplace_back(
        e.group_id,
        SimilarityScore(e.events, v.weights, e.rc_support, holders).score);
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  out.chosen = out.ranking.front().first;
  return out;
}

}  // namespace concealhunt::sti
