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

#include <filesystem>

#include "concealhunt/crypto.h"
#include "concealhunt/cti.h"
#include "concealhunt/error.h"
#include "concealhunt/pipeline.h"
#include "concealhunt/sanitizer.h"
#include "harness_fixture.h"
#include "test_util.h"

namespace concealhunt::cti {
namespace {

using testing::Gw;

std::vector<ThreatCategorySeed> Categories() {
  return {{"cat-1", {"camera"}, "patch camera"}, {"cat-2", {"lock"}, "rotate pins"}};
}

std::vector<GatewayId> Three() { return {Gw(0), Gw(1), Gw(2)}; }

TEST(InitiateTest, DeliversEveryCategoryToEveryParticipant) {
  const auto cats = Categories();
  const HuntSession s = HuntSession::Initiate({cats.begin(), 1}, Three(), 1);
  ASSERT_EQ(s.stored_transcripts().size(), 3u);
  std::set<std::string> to;
  for (const Message& m : s.stored_transcripts()) {
    EXPECT_EQ(m.step, "init.seed");
    EXPECT_EQ(m.from, kCtiAddress);
    EXPECT_EQ(m.payload["category_id"], "cat-1");
    to.insert(m.to);
  }
  EXPECT_EQ(to.size(), 3u);
  EXPECT_EQ(HuntSession::Initiate(cats, Three(), 1).stored_transcripts().size(), 6u);
  EXPECT_EQ(s.phase(), Phase::kInit);
}

TEST(InitiateTest, RefusesBadParticipantLists) {
  const auto cats = Categories();
  const std::vector<GatewayId> two = {Gw(0), Gw(1)};
  EXPECT_THROW(HuntSession::Initiate(cats, two, 1), InvariantError);
  const std::vector<GatewayId> dup = {Gw(0), Gw(1), Gw(0)};
  EXPECT_THROW(HuntSession::Initiate(cats, dup, 1), InvariantError);
  const std::vector<GatewayId> reserved = {Gw(0), Gw(1), {kCtiAddress, 7}};
  EXPECT_THROW(HuntSession::Initiate(cats, reserved, 1), InvariantError);
}

TEST(InitiateTest, SeedEventsMustBeInTaxonomy) {
  const TaxonomyTree tax = ReadTaxonomy(testing::DataPath("sample_taxonomy.tsv"));
  const auto cats = Categories();
  EXPECT_NO_THROW(HuntSession::Initiate(cats, Three(), 1, &tax));
  const std::vector<ThreatCategorySeed> bad = {{"x", {"toaster"}, ""}};
  EXPECT_THROW(HuntSession::Initiate(bad, Three(), 1, &tax), InvariantError);
}

TEST(RelayTest, RecordsEachMessageOnceAndUnchanged) {
  HuntSession s = HuntSession::Initiate({}, Three(), 1);
  const Message m{"str", "psi.blinded", Gw(0).pseudonym, Gw(1).pseudonym,
                  {{"x", 1}, {"y", "z"}}};
  EXPECT_EQ(s.Deliver(m), m.payload);
  const Message to_cti{"sti", "note", Gw(2).pseudonym, kCtiAddress, 3};
  EXPECT_EQ(s.Deliver(to_cti), 3);
  ASSERT_EQ(s.stored_transcripts().size(), 2u);
  EXPECT_EQ(s.stored_transcripts()[0].payload, m.payload);
  EXPECT_EQ(s.stored_transcripts()[0].step, m.step);
  EXPECT_TRUE(s.dead_letters().empty());
}

TEST(RelayTest, UnknownPartiesLeaveDeadLetters) {
  HuntSession s = HuntSession::Initiate({}, Three(), 1);
  EXPECT_THROW(s.Deliver({"str", "x", Gw(0).pseudonym, "stranger", 1}), ProtocolAbort);
  EXPECT_THROW(s.Deliver({"str", "y", "stranger", Gw(0).pseudonym, 1}), ProtocolAbort);
  ASSERT_EQ(s.dead_letters().size(), 2u);
  EXPECT_EQ(s.dead_letters()[0].reason, "unknown recipient");
  EXPECT_EQ(s.dead_letters()[1].reason, "unknown sender");
  EXPECT_TRUE(s.stored_transcripts().empty());
}

TEST(PhaseTest, OnlyForward) {
  HuntSession s = HuntSession::Initiate({}, Three(), 1);
  s.Advance(Phase::kSti);
  EXPECT_THROW(s.Advance(Phase::kStr), InvariantError);
  EXPECT_THROW(s.Advance(Phase::kSti), InvariantError);
  s.Advance(Phase::kDone);
  EXPECT_THROW(s.Deliver({"x", "y", Gw(0).pseudonym, Gw(1).pseudonym, 1}),
               InvariantError);
  EXPECT_STREQ(PhaseName(Phase::kPublish), "publish");
}

TEST(PhaseTest, CatalogNeedsPublishPhase) {
  HuntSession s = HuntSession::Initiate({}, Three(), 1);
  EXPECT_THROW(s.PublishCatalog(), InvariantError);
  s.Advance(Phase::kPublish);
  EXPECT_TRUE(s.PublishCatalog().empty());
}

TEST(TranscriptTest, JsonlRoundTrip) {
  HuntSession s = HuntSession::Initiate(Categories(), Three(), 4);
  s.Deliver({"str", "a", Gw(0).pseudonym, Gw(2).pseudonym, {{"k", {1, 2}}}});
  const auto dir = std::filesystem::temp_directory_path() / "concealhunt_cti_test";
  std::filesystem::create_directories(dir);
  s.WriteTranscript(dir / "t.jsonl");
  const std::vector<Message> back = ReadTranscript(dir / "t.jsonl");
  ASSERT_EQ(back.size(), s.stored_transcripts().size());
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].payload, s.stored_transcripts()[i].payload);
    EXPECT_EQ(back[i].to, s.stored_transcripts()[i].to);
  }
  EXPECT_EQ(s.ExportSession()["session_id"], s.session_id());
  std::filesystem::remove_all(dir);
}

class SessionRunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new harness::SynthConfig(testing::SmallConfig(9, 2, 21));
    dataset_ = new harness::Dataset(harness::Synthesize(*config_));
    // The last gateway is held out for enrollment.
    holdout_ = new EventLog(dataset_->logs.back());
    harness::Dataset hunt = *dataset_;
    hunt.logs.pop_back();
    result_ = new harness::PipelineResult(
        harness::RunPipeline(hunt, testing::DefaultParams(3)));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete holdout_;
    delete dataset_;
    delete config_;
  }

  static harness::SynthConfig* config_;
  static harness::Dataset* dataset_;
  static EventLog* holdout_;
  static harness::PipelineResult* result_;
};

harness::SynthConfig* SessionRunTest::config_ = nullptr;
harness::Dataset* SessionRunTest::dataset_ = nullptr;
EventLog* SessionRunTest::holdout_ = nullptr;
harness::PipelineResult* SessionRunTest::result_ = nullptr;

TEST_F(SessionRunTest, CompletesAndStoresGroups) {
  ASSERT_TRUE(result_->complete) << result_->abort_reason;
  const HuntSession& s = *result_->session;
  EXPECT_EQ(s.phase(), Phase::kDone);
  EXPECT_EQ(s.stored_groups().size(), result_->sti.size());
  EXPECT_TRUE(s.dead_letters().empty());
}

TEST_F(SessionRunTest, TranscriptHoldsNoSuppressedEvent) {
  const std::string jsonl = result_->session->TranscriptJsonl();
  for (const Token& t : dataset_->truth.sensitive) {
    ASSERT_EQ(jsonl.find("\"" + t + "\""), std::string::npos) << t;
    ASSERT_EQ(jsonl.find(TokenDigestHex(t)), std::string::npos) << t;
    ASSERT_EQ(jsonl.find(TokenIdHex(TokenId(t))), std::string::npos) << t;
  }
}

TEST_F(SessionRunTest, CatalogHasOneEntryPerFinalGroup) {
  const auto groups = result_->FinalGroups();
  ASSERT_EQ(result_->catalog.size(), groups.size());
  std::set<std::string> ids;
  for (const auto& g : groups) ids.insert(g.Id());
  for (const auto& e : result_->catalog) {
    EXPECT_TRUE(ids.count(e.group_id));
    EXPECT_TRUE(e.events.count(e.core_point));
    EXPECT_EQ(e.level, e.events.size());
    EXPECT_FALSE(e.countermeasures.empty());
    for (const auto& [t, v] : e.rc_support) {
      EXPECT_TRUE(e.events.count(t));
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST_F(SessionRunTest, HoldoutEnrollsWithItsTopic) {
  const std::string& pseudonym = holdout_->gateway.pseudonym;
  const SanitizedLog log =
      Sanitize(*holdout_, dataset_->taxonomy, dataset_->policies.at(pseudonym));
  const sti::Enrollment e =
      sti::EnrollNewMember(log, result_->catalog, result_->stats);
  const uint32_t topic = dataset_->truth.topic_of.at(pseudonym);
  size_t same = 0, total = 0;
  for (const auto& g : result_->FinalGroups()) {
    if (g.Id() != e.chosen) continue;
    for (const auto& m : g.members) {
      ++total;
      same += dataset_->truth.topic_of.at(m.pseudonym) == topic;
    }
  }
  ASSERT_GT(total, 0u);
  EXPECT_GT(2 * same, total);
}

TEST_F(SessionRunTest, ReplayIsByteIdentical) {
  harness::Dataset hunt = *dataset_;
  hunt.logs.pop_back();
  const auto again = harness::RunPipeline(hunt, testing::DefaultParams(3));
  EXPECT_EQ(again.session->TranscriptJsonl(), result_->session->TranscriptJsonl());
  EXPECT_EQ(harness::GroupsJson(again).dump(), harness::GroupsJson(*result_).dump());
}

}  // namespace
}  // namespace concealhunt::cti
