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

#include <set>
#include <sstream>

#include "concealhunt/canonical.h"
#include "concealhunt/core_model.h"
#include "concealhunt/error.h"
#include "concealhunt/io.h"
#include "concealhunt/synth.h"
#include "test_util.h"

namespace concealhunt {
namespace {

using testing::DataPath;
using testing::Gw;

TEST(TaxonomyTest, SampleTaxonomyShape) {
  const TaxonomyTree t = ReadTaxonomy(DataPath("sample_taxonomy.tsv"));
  EXPECT_EQ(t.root(), "root");
  EXPECT_EQ(t.Depth("root"), 0);
  EXPECT_EQ(t.Depth("camera"), 1);
  EXPECT_EQ(t.Depth("camera.stream.start"), 3);
  EXPECT_EQ(t.PathToRoot("camera.stream.start"),
            (std::vector<Token>{"camera.stream.start", "camera.stream", "camera",
                                "root"}));
  EXPECT_EQ(t.AtDepth(1), (std::vector<Token>{"camera", "lock", "thermostat"}));
  EXPECT_EQ(t.Children("camera.stream"),
            (std::vector<Token>{"camera.stream.start", "camera.stream.stop"}));
}

TEST(TaxonomyTest, RejectsMalformedTrees) {
  EXPECT_THROW(TaxonomyTree::FromPairs({{"a", "b"}, {"b", "a"}}), InvariantError);
  EXPECT_THROW(TaxonomyTree::FromPairs({{"r", "r"}, {"a", "r"}, {"a", "b"}, {"b", "r"}}),
               InvariantError);
  EXPECT_THROW(TaxonomyTree::FromPairs({{"r", "r"}, {"a", "r"}, {"b", "c"}, {"c", "b"}}),
               InvariantError);
  EXPECT_THROW(TaxonomyTree::FromPairs({{"a", "b"}}), InvariantError);
}

TEST(TaxonomyTest, WriteReadRoundTrip) {
  const TaxonomyTree t = ReadTaxonomy(DataPath("sample_taxonomy.tsv"));
  std::stringstream s;
  WriteTaxonomy(s, t);
  EXPECT_EQ(ReadTaxonomy(s), t);
}

TEST(CanonicalTest, EventEncodingIsDeterministic) {
  const Event e{"e1", "d1", 0, {}};
  EXPECT_EQ(CanonicalEncode(e), CanonicalEncode(e));
}

TEST(CanonicalTest, TimestampChangesEncoding) {
  EXPECT_NE(CanonicalEncode(Event{"e1", "d1", 0, {}}),
            CanonicalEncode(Event{"e1", "d1", 1, {}}));
}

TEST(CanonicalTest, TypesDoNotShareEncodings) {
  const GatewayId id{"e1", 0};
  EXPECT_NE(CanonicalEncode(id), CanonicalEncodeToken("e1"));
}

TEST(CanonicalTest, SynthesizedLogsRoundTrip) {
  harness::SynthConfig c;
  c.num_gateways = 1000;
  c.days = 2;
  c.events_per_day = 5;
  c.rng_seed = 11;
  const harness::Dataset ds = harness::Synthesize(c);
  ASSERT_EQ(ds.logs.size(), 1000u);
  for (const EventLog& log : ds.logs) {
    ASSERT_EQ(DecodeEventLog(CanonicalEncode(log)), log);
  }
  EXPECT_EQ(DecodeTaxonomyTree(CanonicalEncode(ds.taxonomy)), ds.taxonomy);
}

TEST(CanonicalTest, AttributesRoundTrip) {
  EventLog log{Gw(1), {{"a", "d", 5, {{"k", "v"}, {"z", ""}}}}};
  EXPECT_EQ(DecodeEventLog(CanonicalEncode(log)), log);
}

TEST(CanonicalTest, TruncatedOrPaddedInputIsRejected) {
  std::vector<uint8_t> bytes = CanonicalEncode(Event{"e1", "d1", 3, {}});
  std::vector<uint8_t> shorter(bytes.begin(), bytes.end() - 1);
  EXPECT_THROW(DecodeEvent(shorter), InvariantError);
  bytes.push_back(0);
  EXPECT_THROW(DecodeEvent(bytes), InvariantError);
}

TEST(CanonicalTest, EncodingRefusesInvalidValues) {
  EXPECT_THROW(CanonicalEncode(Event{"", "d", 0, {}}), InvariantError);
  EXPECT_THROW(CanonicalEncode(Event{"e", "d", -1, {}}), InvariantError);
  RealThreatGroup g;
  g.events = {"a"};
  g.core_point = "b";
  EXPECT_THROW(CanonicalEncode(g), InvariantError);
}

TEST(CanonicalTest, GroupsRoundTrip) {
  RealThreatGroup g{{"a", "b"}, {Gw(1), Gw(2)}, "b", 2};
  EXPECT_EQ(DecodeRealThreatGroup(CanonicalEncode(g)), g);
  VirtualThreatGroup vc{{g}, {Gw(1), Gw(2)}, Gw(1)};
  EXPECT_EQ(DecodeVirtualThreatGroup(CanonicalEncode(vc)), vc);
  EventVector v{Gw(3), {{"a", 0.25}, {"b", 1.5}}, 4};
  EXPECT_EQ(DecodeEventVector(CanonicalEncode(v)), v);
}

TEST(LogTest, RecordsMustBeTimeOrdered) {
  EventLog log{Gw(1), {{"a", "d", 5, {}}, {"b", "d", 4, {}}}};
  EXPECT_THROW(Validate(log), InvariantError);
}

TEST(GroupTest, IdDependsOnlyOnEvents) {
  RealThreatGroup a{{"x", "y"}, {Gw(1)}, "x", 2};
  RealThreatGroup b{{"y", "x"}, {Gw(2), Gw(3)}, "y", 2};
  RealThreatGroup c{{"x"}, {Gw(1)}, "x", 1};
  EXPECT_EQ(a.Id(), b.Id());
  EXPECT_NE(a.Id(), c.Id());
  EXPECT_EQ(a.Id().size(), 16u);
}

TEST(GroupTest, Disjointness) {
  VirtualThreatGroup vc;
  vc.trusted_node = Gw(1);
  vc.members = {Gw(1), Gw(2), Gw(3)};
  vc.groups = {{{"a"}, {Gw(1)}, "a", 1}, {{"b"}, {Gw(2), Gw(3)}, "b", 1}};
  EXPECT_TRUE(SatisfiesDisjointness(vc));
  EXPECT_NO_THROW(Validate(vc));

  vc.groups[1].members.insert(Gw(1));
  EXPECT_FALSE(SatisfiesDisjointness(vc));
  EXPECT_THROW(Validate(vc), InvariantError);

  vc.groups[1].members = {Gw(2), Gw(3)};
  vc.groups[1].events = {"a"};
  vc.groups[1].core_point = "a";
  EXPECT_FALSE(SatisfiesDisjointness(vc));
}

TEST(GroupTest, MembersMustCoverVirtualGroup) {
  VirtualThreatGroup vc;
  vc.trusted_node = Gw(1);
  vc.members = {Gw(1), Gw(2)};
  vc.groups = {{{"a"}, {Gw(1)}, "a", 1}};
  EXPECT_THROW(Validate(vc), InvariantError);
}

TEST(PseudonymTest, HexAndDistinct) {
  Rng rng(4);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    const std::string p = NewPseudonym(rng);
    EXPECT_EQ(p.size(), 32u);
    EXPECT_EQ(p.find_first_not_of("0123456789abcdef"), std::string::npos);
    seen.insert(p);
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST(RngTest, DerivedStreamsAreStableAndIndependent) {
  Rng a = Rng::Derive(9, "x");
  Rng b = Rng::Derive(9, "x");
  Rng c = Rng::Derive(9, "y");
  const uint64_t first = a.Next();
  EXPECT_EQ(first, b.Next());
  EXPECT_NE(first, c.Next());
}

TEST(RngTest, BelowStaysInRange) {
  Rng rng(3);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const uint64_t v = rng.Below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(IoTest, FixtureLogsLoad) {
  const std::vector<EventLog> logs = ReadEventLogs(DataPath("fixture_logs.jsonl"));
  ASSERT_EQ(logs.size(), 4u);
  for (size_t i = 0; i < logs.size(); ++i) {
    EXPECT_EQ(logs[i].gateway.index, i);
    EXPECT_EQ(logs[i].records.size(), 5u);
  }
  std::stringstream s;
  WriteEventLogs(s, logs);
  EXPECT_EQ(ReadEventLogs(s), logs);
}

}  // namespace
}  // namespace concealhunt
