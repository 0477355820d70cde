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

// Small synthesized datasets for the end-to-end tests.

#ifndef CONCEALHUNT_TESTS_HARNESS_FIXTURE_H_
#define CONCEALHUNT_TESTS_HARNESS_FIXTURE_H_

#include <cstdint>

#include "concealhunt/pipeline.h"
#include "concealhunt/synth.h"

namespace concealhunt::testing {

inline harness::SynthConfig SmallConfig(uint32_t gateways, uint32_t topics,
                                        uint64_t seed) {
  harness::SynthConfig c;
  c.num_gateways = gateways;
  c.planted_topics = topics;
  c.days = 20;
  c.events_per_day = 20;
  c.rng_seed = seed;
  return c;
}

inline harness::ProtocolParams DefaultParams(uint64_t seed) {
  harness::ProtocolParams p;
  p.seed = seed;
  return p;
}

}  // namespace concealhunt::testing

#endif  // CONCEALHUNT_TESTS_HARNESS_FIXTURE_H_
