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

#include <gtest/gtest.h>

#include "concealhunt/error.h"
#include "concealhunt/io.h"
#include "concealhunt/sanitizer.h"
#include "test_util.h"

namespace concealhunt {
namespace {

using testing::DataPath;
using testing::Gw;

class SanitizerTest : public ::testing::Test {
 protected:
  SanitizerTest()
      : taxonomy_(ReadTaxonomy(DataPath("sample_taxonomy.tsv"))),
        policy_(ReadPolicy(DataPath("sample_policy.json"))) {}

  EventLog RandomLog(Rng& rng, size_t n) const {
    std::vector<Token> leaves = taxonomy_.AtDepth(3);
    EventLog log{Gw(0), {}};
    for (size_t i = 0; i < n; ++i) {
      log.records.push_back({leaves[rng.Below(leaves.size())], "dev",
                             static_cast<int64_t>(i * 60), {}});
    }
    return log;
  }

  TaxonomyTree taxonomy_;
  SanitizePolicy policy_;
};

TEST_F(SanitizerTest, RootGeneralizesToItself) {
  for (int d = 0; d < 5; ++d) EXPECT_EQ(Generalize("root", taxonomy_, d), "root");
}

TEST_F(SanitizerTest, TokenAtItsOwnDepthIsUnchanged) {
  EXPECT_EQ(Generalize("camera.stream.start", taxonomy_, 3), "camera.stream.start");
  EXPECT_EQ(Generalize("camera.stream.start", taxonomy_, 7), "camera.stream.start");
}

TEST_F(SanitizerTest, WalksUpThePath) {
  // root -> camera -> camera.stream -> camera.stream.start
  EXPECT_EQ(Generalize("camera.stream.start", taxonomy_, 1), "camera");
  EXPECT_EQ(Generalize("camera.stream.start", taxonomy_, 2), "camera.stream");
  EXPECT_EQ(Generalize("camera.stream.start", taxonomy_, 0), "root");
}

TEST_F(SanitizerTest, UnknownTokenIsNamed) {
  try {
    Generalize("toaster.burn", taxonomy_, 1);
    FAIL() << "expected an error";
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("toaster.burn"), std::string::npos);
  }
}

TEST_F(SanitizerTest, EmptyLog) {
  const SanitizedLog s = Sanitize(EventLog{Gw(1), {}}, taxonomy_, policy_);
  EXPECT_TRUE(s.records.empty());
  EXPECT_EQ(s.suppressed_count, 0u);
  EXPECT_EQ(s.gateway, Gw(1));
}

TEST_F(SanitizerTest, SuppressesAndGeneralizes) {
  EventLog log{Gw(1),
               {{"camera.stream.start", "cam", 1, {}},
                {"lock.access.pin_fail", "lock", 2, {}},
                {"lock.access.unlock", "lock", 3, {}},
                {"thermostat.remote.login", "th", 4, {}},
                {"thermostat.schedule.set", "th", 5, {}}}};
  const SanitizedLog s = Sanitize(log, taxonomy_, policy_);
  EXPECT_EQ(s.suppressed_count, 2u);
  ASSERT_EQ(s.records.size(), 3u);
  EXPECT_EQ(s.records[0].event_id, "camera.stream");
  EXPECT_EQ(s.records[1].event_id, "lock.access");
  EXPECT_EQ(s.records[2].event_id, "thermostat.schedule");
  EXPECT_EQ(s.records[2].timestamp, 5);
}

TEST_F(SanitizerTest, PerTokenDepthOverridesDefault) {
  SanitizePolicy p = policy_;
  p.generalize_events["camera.stream.start"] = 1;
  EventLog log{Gw(1), {{"camera.stream.start", "cam", 1, {}},
                       {"camera.motion.clip", "cam", 2, {}}}};
  const SanitizedLog s = Sanitize(log, taxonomy_, p);
  EXPECT_EQ(s.records[0].event_id, "camera");
  EXPECT_EQ(s.records[1].event_id, "camera.motion");
}

TEST_F(SanitizerTest, SensitiveHypernymSuppressesDescendants) {
  SanitizePolicy p;
  p.default_depth = 2;
  p.sensitive_events = {"lock.access"};
  EventLog log{Gw(1), {{"lock.access.unlock", "lock", 1, {}},
                       {"lock.firmware.update", "lock", 2, {}}}};
  const SanitizedLog s = Sanitize(log, taxonomy_, p);
  EXPECT_EQ(s.suppressed_count, 1u);
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_EQ(s.records[0].event_id, "lock.firmware");
}

TEST_F(SanitizerTest, PolicyMismatchIsRejected) {
  SanitizePolicy unknown = policy_;
  unknown.sensitive_events.insert("toaster");
  EXPECT_THROW(ValidatePolicy(unknown, taxonomy_), InvariantError);
  EXPECT_THROW(Sanitize(EventLog{Gw(1), {}}, taxonomy_, unknown), InvariantError);

  SanitizePolicy both = policy_;
  both.generalize_events["lock.access.pin_fail"] = 1;
  EXPECT_THROW(ValidatePolicy(both, taxonomy_), InvariantError);

  SanitizePolicy negative = policy_;
  negative.default_depth = -1;
  EXPECT_THROW(ValidatePolicy(negative, taxonomy_), InvariantError);
}

TEST_F(SanitizerTest, IdempotentOnRandomLogs) {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const EventLog log = RandomLog(rng, 1 + rng.Below(30));
    const SanitizedLog once = Sanitize(log, taxonomy_, policy_);
    const SanitizedLog twice = Sanitize(AsEventLog(once), taxonomy_, policy_);
    ASSERT_EQ(twice.records, once.records);
    ASSERT_EQ(twice.suppressed_count, 0u);
  }
}

TEST_F(SanitizerTest, SensitiveTokensNeverSurvive) {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const SanitizedLog s = Sanitize(RandomLog(rng, 25), taxonomy_, policy_);
    for (const Event& e : s.records) {
      ASSERT_FALSE(policy_.sensitive_events.count(e.event_id)) << e.event_id;
    }
  }
}

TEST_F(SanitizerTest, PolicyJsonRoundTrip) {
  EXPECT_EQ(PolicyFromJson(PolicyToJson(policy_)), policy_);
}

}  // namespace
}  // namespace concealhunt
