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

#include "concealhunt/sanitizer.h"

#include "concealhunt/error.h"

namespace concealhunt {

void ValidatePolicy(const SanitizePolicy& policy,
                    const TaxonomyTree& taxonomy) {
  if (policy.default_depth < 0) {
    throw InvariantError("policy: negative default depth");
  }
  for (const Token& t : policy.sensitive_events) {
    if (!taxonomy.Contains(t)) {
      throw InvariantError("policy: sensitive token '" + t +
                           "' is not in the taxonomy");
    }
  }
  for (const auto& [t, depth] : policy.generalize_events) {
    if (!taxonomy.Contains(t)) {
      throw InvariantError("policy: generalized token '" + t +
                           "' is not in the taxonomy");
    }
    if (policy.sensitive_events.count(t)) {
      throw InvariantError("policy: token '" + t +
                           "' is both sensitive and generalized");
    }
    if (depth < 0) throw InvariantError("policy: negative depth for '" + t + "'");
  }
}

Token Generalize(const Token& token, const TaxonomyTree& taxonomy, int depth) {
  if (!taxonomy.Contains(token)) {
    throw InvariantError("generalize: unknown token '" + token + "'");
  }
  if (depth < 0) throw InvariantError("generalize: negative depth");
  Token cur = token;
  for (int d = taxonomy.Depth(token); d > depth; --d) cur = taxonomy.Parent(cur);
  return cur;
}

SanitizedLog Sanitize(const EventLog& log, const TaxonomyTree& taxonomy,
                      const SanitizePolicy& policy) {
  Validate(log);
  ValidatePolicy(policy, taxonomy);
  for (const Event& e : log.records) {
    if (!taxonomy.Contains(e.event_id)) {
      throw InvariantError("sanitize: token '" + e.event_id +
                           "' is not in the taxonomy");
    }
  }

  SanitizedLog out;
  out.gateway = log.gateway;
  out.records.reserve(log.records.size());
  for (const Event& e : log.records) {
    if (policy.sensitive_events.count(e.event_id)) {
      ++out.suppressed_count;
      continue;
    }
    auto it = policy.generalize_events.find(e.event_id);
    const int depth =
        it == policy.generalize_events.end() ? policy.default_depth : it->second;
    Token general = Generalize(e.event_id, taxonomy, depth);
    if (policy.sensitive_events.count(general)) {
      ++out.suppressed_count;
      continue;
    }
    Event g = e;
    g.event_id = std::move(general);
    out.records.push_back(std::move(g));
  }
  return out;
}

EventLog AsEventLog(const SanitizedLog& log) {
  return EventLog{log.gateway, log.records};
}

}  // namespace concealhunt
