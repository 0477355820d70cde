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

#ifndef CONCEALHUNT_SANITIZER_H_
#define CONCEALHUNT_SANITIZER_H_

#include <map>
#include <set>

#include "concealhunt/core_model.h"

namespace concealhunt {

// Owner policy for the local concealment agent.
struct SanitizePolicy {
  std::set<Token> sensitive_events;          // suppressed entirely
  std::map<Token, int> generalize_events;    // token -> target depth
  int default_depth = 0;

  friend bool operator==(const SanitizePolicy&,
                         const SanitizePolicy&) = default;
};

// Throws InvariantError when the policy references unknown tokens, marks a
// token both sensitive and generalized, or uses a negative depth.
void ValidatePolicy(const SanitizePolicy& policy, const TaxonomyTree& taxonomy);

// Ancestor of token at the given depth, or the token itself when it is
// already at or above that depth.
Token Generalize(const Token& token, const TaxonomyTree& taxonomy, int depth);

// Suppresses sensitive records and replaces the rest by their hypernym at the
// policy depth. A record whose hypernym is itself sensitive is suppressed.
// Record order is preserved.
SanitizedLog Sanitize(const EventLog& log, const TaxonomyTree& taxonomy,
                      const SanitizePolicy& policy);

// View of a sanitized log as an ordinary log (for re-sanitizing).
EventLog AsEventLog(const SanitizedLog& log);

}  // namespace concealhunt

#endif  // CONCEALHUNT_SANITIZER_H_
