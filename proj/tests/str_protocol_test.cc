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

#include <algorithm>
#include <functional>
#include <numeric>

#include "concealhunt/crypto.h"
#include "concealhunt/error.h"
#include "concealhunt/str_protocol.h"
#include "concealhunt/weighting.h"
#include "test_util.h"

namespace concealhunt {
namespace {

using nlohmann::json;
using testing::Gw;

std::set<Token> RandomTokens(Rng& rng, const std::vector<Token>& vocab, size_t max) {
  std::set<Token> out;
  const size_t n = rng.Below(max + 1);
  while (out.size() < n) out.insert(vocab[rng.Below(vocab.size())]);
  return out;
}

std::vector<Token> Vocab(size_t n) {
  std::vector<Token> v;
  for (size_t i = 0; i < n; ++i) v.push_back("svc." + std::to_string(i) + ".evt");
  return v;
}

// Rewrites one step's payload on the way through.
class TamperingChannel : public Channel {
 public:
  TamperingChannel(std::string step, std::function<void(json&)> edit)
      : step_(std::move(step)), edit_(std::move(edit)) {}
  json Deliver(const Message& m) override {
    json p = m.payload;
    if (m.step == step_) edit_(p);
    return p;
  }

 private:
  std::string step_;
  std::function<void(json&)> edit_;
};

TEST(ElectionTest, SmallestDigestWins) {
  std::vector<GatewayId> ids;
  for (uint32_t i = 0; i < 10; ++i) ids.push_back(Gw(i));
  GatewayId expected = ids[0];
  for (const GatewayId& id : ids) {
    if (ToHex(Sha256(id.pseudonym)) < ToHex(Sha256(expected.pseudonym))) expected = id;
  }
  EXPECT_EQ(str::ElectTrustedNode(ids), expected);
  EXPECT_EQ(str::PseudonymDigest(ids[3]), ToHex(Sha256(ids[3].pseudonym)));
}

TEST(RingTest, NeedsThreeDistinctParticipants) {
  EXPECT_THROW(str::FormRing({Gw(1), Gw(2)}, 1), InvariantError);
  EXPECT_THROW(str::FormRing({Gw(1), Gw(2), Gw(1)}, 1), InvariantError);
  const str::RingTopology r = str::FormRing({Gw(1), Gw(2), Gw(3)}, 1);
  EXPECT_EQ(r.order.size(), 3u);
  EXPECT_TRUE(std::count(r.order.begin(), r.order.end(), r.trusted_node));
}

TEST(RingTest, SeedControlsOrder) {
  std::vector<GatewayId> ids;
  for (uint32_t i = 0; i < 16; ++i) ids.push_back(Gw(i));
  const auto a = str::FormRing(ids, 77);
  const auto b = str::FormRing(ids, 77);
  const auto c = str::FormRing(ids, 78);
  EXPECT_EQ(a.order, b.order);
  EXPECT_NE(a.order, c.order);
  EXPECT_EQ(a.trusted_node, c.trusted_node);
}

TEST(PsiTest, IntersectionSizeMatchesPlaintext) {
  Rng rng(101);
  const std::vector<Token> vocab = Vocab(60);
  for (int trial = 0; trial < 25; ++trial) {
    const std::set<Token> c = RandomTokens(rng, vocab, 40);
    const std::set<Token> d = RandomTokens(rng, vocab, 40);
    std::vector<Token> both;
    std::set_intersection(c.begin(), c.end(), d.begin(), d.end(),
                          std::back_inserter(both));
    Rng c_rng(rng.Next()), d_rng(rng.Next());
    DirectChannel ch;
    const str::PsiTranscript t =
        str::PsiSession(Gw(1), c, Gw(2), d, 512, c_rng, d_rng, ch);
    ASSERT_TRUE(t.complete);
    ASSERT_EQ(t.intersection.size(), both.size());
    ASSERT_EQ(t.size_c, c.size());
    ASSERT_EQ(t.size_d, d.size());
    ASSERT_EQ(t.blinded.size(), d.size());
    ASSERT_EQ(t.hashed_c.size(), c.size());
  }
}

TEST(PsiTest, EmptySides) {
  Rng a(1), b(2);
  DirectChannel ch;
  const auto t = str::PsiSession(Gw(1), {}, Gw(2), {"x"}, 512, a, b, ch);
  EXPECT_TRUE(t.complete);
  EXPECT_TRUE(t.intersection.empty());
}

TEST(PsiTest, MessagesCarryNoPlainToken) {
  const std::vector<Token> vocab = Vocab(30);
  Rng rng(5);
  const std::set<Token> c = RandomTokens(rng, vocab, 20);
  const std::set<Token> d = RandomTokens(rng, vocab, 20);
  Rng a(1), b(2);
  DirectChannel ch;
  str::PsiSession(Gw(1), c, Gw(2), d, 512, a, b, ch);
  ASSERT_EQ(ch.log().size(), 4u);
  for (const Message& m : ch.log()) {
    const std::string dump = m.payload.dump();
    for (const Token& t : vocab) ASSERT_EQ(dump.find(t), std::string::npos) << t;
  }
}

TEST(PsiTest, TruncatedSignaturesAbort) {
  Rng a(1), b(2);
  TamperingChannel ch("psi.signed", [](json& p) { p.erase(p.size() - 1); });
  EXPECT_THROW(str::PsiSession(Gw(1), {"x", "y"}, Gw(2), {"x", "z"}, 512, a, b, ch),
               ProtocolAbort);
}

TEST(ReportTest, SealedToTrustedNode) {
  Rng a(1), b(2), k(3);
  DirectChannel ch;
  const auto t = str::PsiSession(Gw(1), {"x", "y"}, Gw(2), {"x", "z", "w"}, 512, a, b, ch);
  const BoxKeypair trusted = GenerateBoxKeypair(k);
  const BoxKeypair other = GenerateBoxKeypair(k);
  const Envelope env = str::SubmitReport(t, Gw(9), trusted.public_key, b);
  const str::SimilarityReport r = str::OpenReport(env, trusted);
  EXPECT_EQ(r.intersection_size, 1u);
  EXPECT_EQ(r.size_c, 2u);
  EXPECT_EQ(r.size_d, 3u);
  EXPECT_DOUBLE_EQ(r.similarity, GatewaysSimilarity(1, 2, 3));
  EXPECT_THROW(str::OpenReport(env, other), CryptoError);

  str::PsiTranscript incomplete = t;
  incomplete.complete = false;
  EXPECT_THROW(str::SubmitReport(incomplete, Gw(9), trusted.public_key, b),
               InvariantError);
}

struct Fixture {
  std::vector<str::Participant> participants;
  std::vector<std::set<Token>> sets;
};

Fixture MakeFixture(const std::vector<std::set<Token>>& sets, uint64_t seed) {
  Fixture f;
  Rng rng(seed);
  for (size_t i = 0; i < sets.size(); ++i) {
    f.participants.push_back({Gw(uint32_t(i)), sets[i], GenerateBoxKeypair(rng)});
  }
  f.sets = sets;
  return f;
}

TEST(AggregateTest, MatrixMatchesPlaintextSimilarity) {
  const Fixture f = MakeFixture({{"a", "b", "c"},
                                 {"b", "c", "d"},
                                 {"a", "b", "c", "d", "e"},
                                 {"x", "y"},
                                 {"x", "y", "z"},
                                 {"q"}},
                                3);
  DirectChannel ch;
  const str::Result r = str::Run(f.participants, {}, 9, ch);
  const auto& m = r.matrix;
  ASSERT_EQ(m.gateways.size(), 6u);
  ASSERT_EQ(m.reports_consumed, 15u);
  for (size_t i = 0; i < 6; ++i) {
    for (size_t j = 0; j < 6; ++j) {
      const size_t gi = m.gateways[i].index;
      const size_t gj = m.gateways[j].index;
      std::vector<Token> both;
      std::set_intersection(f.sets[gi].begin(), f.sets[gi].end(), f.sets[gj].begin(),
                            f.sets[gj].end(), std::back_inserter(both));
      const double expected =
          2.0 * both.size() /
          double(f.sets[gi].size() * f.sets[gi].size() + f.sets[gj].size() * f.sets[gj].size());
      EXPECT_NEAR(m.squared(i, j), expected, 1e-12) << i << "," << j;
    }
  }
}

TEST(AggregateTest, MissingPairAborts) {
  Rng rng(4);
  const BoxKeypair trusted = GenerateBoxKeypair(rng);
  std::vector<Envelope> reports;
  for (auto [c, d] : {std::pair{0u, 1u}, std::pair{0u, 2u}}) {
    Rng a(c + 10), b(d + 20);
    DirectChannel ch;
    auto t = str::PsiSession(Gw(c), {"x"}, Gw(d), {"x"}, 512, a, b, ch);
    reports.push_back(str::SubmitReport(t, Gw(0), trusted.public_key, b));
  }
  const std::vector<GatewayId> ids = {Gw(0), Gw(1), Gw(2)};
  try {
    str::AggregateSimilarities(ids, reports, trusted);
    FAIL();
  } catch (const ProtocolAbort& e) {
    EXPECT_NE(std::string(e.what()).find(Gw(1).pseudonym + "/" + Gw(2).pseudonym),
              std::string::npos);
  }
  reports.push_back(reports.back());
  EXPECT_THROW(str::AggregateSimilarities(ids, reports, trusted), ProtocolAbort);
}

TEST(ClusterTest, TwoPlantedBlocks) {
  std::vector<GatewayId> ids;
  for (uint32_t i = 0; i < 6; ++i) ids.push_back(Gw(i));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i != j && (i < 3) == (j < 3)) m(i, j) = 0.4;
    }
  }
  const auto groups = str::SSeedsCluster(m, ids, 0.2);
  ASSERT_EQ(groups.size(), 2u);
  std::set<std::set<GatewayId>> got;
  for (const auto& g : groups) {
    got.insert(g.members);
    EXPECT_TRUE(g.members.count(g.trusted_node));
  }
  EXPECT_EQ(got, (std::set<std::set<GatewayId>>{{ids[0], ids[1], ids[2]},
                                                {ids[3], ids[4], ids[5]}}));
}

TEST(ClusterTest, PartitionIgnoresInputOrder) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 3 + rng.Below(10);
    std::vector<GatewayId> ids;
    for (uint32_t i = 0; i < n; ++i) ids.push_back(Gw(i));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.Below(5) * 0.1;
    }
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(perm);
    std::vector<GatewayId> pids(n);
    Eigen::MatrixXd pm(n, n);
    for (size_t i = 0; i < n; ++i) {
      pids[i] = ids[perm[i]];
      for (size_t j = 0; j < n; ++j) pm(i, j) = m(perm[i], perm[j]);
    }
    auto as_sets = [](const std::vector<VirtualThreatGroup>& gs) {
      std::set<std::set<GatewayId>> out;
      for (const auto& g : gs) out.insert(g.members);
      return out;
    };
    ASSERT_EQ(as_sets(str::SSeedsCluster(m, ids, 0.2)),
              as_sets(str::SSeedsCluster(pm, pids, 0.2)));
  }
}

TEST(ClusterTest, GroupBoundIsHonoured) {
  std::vector<GatewayId> ids;
  for (uint32_t i = 0; i < 5; ++i) ids.push_back(Gw(i));
  const Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
  EXPECT_EQ(str::SSeedsCluster(m, ids, 0.2).size(), 5u);
  const auto bounded = str::SSeedsCluster(m, ids, 0.2, 2);
  ASSERT_EQ(bounded.size(), 2u);
  EXPECT_EQ(bounded[0].members.size() + bounded[1].members.size(), 5u);
}

TEST(ClusterTest, RejectsAsymmetricMatrix) {
  std::vector<GatewayId> ids = {Gw(0), Gw(1), Gw(2)};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = 0.3;
  EXPECT_THROW(str::SSeedsCluster(m, ids, 0.2), InvariantError);
}

TEST(RunTest, ThreeOverlappingGatewaysFormOneGroup) {
  // Each pair shares one of two tokens: 2*1 / (4 + 4) = 0.25.
  const Fixture f = MakeFixture({{"a", "b"}, {"b", "c"}, {"a", "c"}}, 8);
  DirectChannel ch;
  const str::Result r = str::Run(f.participants, {}, 3, ch);
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_EQ(r.groups[0].members.size(), 3u);
  EXPECT_EQ(r.transcripts.size(), 3u);
  for (const Message& m : ch.log()) {
    const std::string dump = m.payload.dump();
    for (const char* t : {"\"a\"", "\"b\"", "\"c\""}) {
      ASSERT_EQ(dump.find(t), std::string::npos) << m.step;
    }
  }
  EXPECT_EQ(ch.log().back().to, kCtiAddress);
}

}  // namespace
}  // namespace concealhunt
