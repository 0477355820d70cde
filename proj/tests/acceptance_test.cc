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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "concealhunt/attack.h"
#include "concealhunt/crypto.h"
#include "concealhunt/error.h"
#include "concealhunt/evaluate.h"
#include "concealhunt/pipeline.h"
#include "concealhunt/str_protocol.h"
#include "concealhunt/sti_protocol.h"
#include "concealhunt/synth.h"
#include "harness_fixture.h"
#include "mining_fixture.h"

namespace concealhunt {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome PsiExactness() {
  Rng rng(1001);
  std::vector<Token> vocab;
  for (int i = 0; i < 80; ++i) vocab.push_back("dev" + std::to_string(i) + ".svc");
  const auto start = Clock::now();
  size_t ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::set<Token> c, d;
    const size_t nc = rng.Below(41), nd = rng.Below(41);
    while (c.size() < nc) c.insert(vocab[rng.Below(vocab.size())]);
    while (d.size() < nd) d.insert(vocab[rng.Below(vocab.size())]);
    size_t oracle = 0;
    for (const Token& t : c) oracle += d.count(t);
    Rng c_rng(rng.Next()), d_rng(rng.Next());
    DirectChannel ch;
    const auto t = str::PsiSession(testing::Gw(0), c, testing::Gw(1), d, 512, c_rng,
                                   d_rng, ch);
    ok += t.complete && t.intersection.size() == oracle;
  }
  const double secs = Since(start);
  std::ostringstream out;
  out << ok << "/200 exact in " << secs << " s";
  return {ok == 200 && secs < 30.0, out.str()};
}

Outcome BlindIdentity() {
  std::ostringstream out;
  bool pass = true;
  for (unsigned bits : {512u, 1024u}) {
    Rng rng(2000 + bits);
    const BlindKeypair key = GenerateBlindKeypair(bits, rng);
    size_t failures = 0;
    for (int i = 0; i < 1000; ++i) {
      const BigInt m = RandomRange(rng, BigInt(2), key.modulus);
      const BlindingFactor r = NewBlindingFactor(key.Public(), rng);
      const BigInt s = Unblind(Sign(Blind(m, key.Public(), r), key), r, key.modulus);
      // Direct signature computed without the library's signer.
      BigInt direct;
      mpz_powm(direct.get_mpz_t(), m.get_mpz_t(), key.private_exponent.get_mpz_t(),
               key.modulus.get_mpz_t());
      failures += s != direct;
    }
    out << bits << "-bit failures " << failures << "; ";
    pass = pass && failures == 0;
  }
  return {pass, out.str()};
}

Outcome CommutativePeel() {
  const CommutativeGroup& group = CommutativeGroup::ForBits(512);
  Rng rng(3003);
  std::vector<CommutativeKey> keys;
  for (int i = 0; i < 4; ++i) keys.push_back(GenerateCommutativeKey(group, rng));
  size_t failures = 0, checks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Bytes plain(1 + rng.Below(100));
    for (auto& b : plain) b = static_cast<uint8_t>(rng.Below(256));
    std::vector<BigInt> onion = EmbedRecord(plain, group);
    for (const auto& k : keys) {
      for (BigInt& x : onion) x = CommEncrypt(x, k);
    }
    std::vector<int> order = {0, 1, 2, 3};
    do {
      std::vector<BigInt> layer = onion;
      for (int i : order) {
        for (BigInt& x : layer) x = CommDecrypt(x, keys[i]);
      }
      ++checks;
      try {
        failures += ExtractRecord(layer, group) != plain;
      } catch (const CryptoError&) {
        ++failures;
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
  std::ostringstream out;
  out << checks << " peels, " << failures << " failures";
  return {failures == 0 && checks == 2400, out.str()};
}

Outcome DistributedMining() {
  size_t fixtures = 0, mismatches = 0, closure_violations = 0;
  Rng rng(4004);
  for (int trial = 0; trial < 24; ++trial) {
    const size_t gateways = 3 + rng.Below(6);
    const size_t tokens = 6 + rng.Below(15);
    const auto f = testing::MakeMiningFixture(rng.Next(), gateways, tokens,
                                              6 + rng.Below(10));
    sti::Params p;
    p.mining.min_support = 0.2 + 0.05 * rng.Below(5);
    p.mining.min_closure = 1.0;
    p.mining.max_size = 3;
    DirectChannel ch;
    const auto out = sti::RunVirtualGroup(f.vc, f.members, f.stats, f.vocab, p,
                                          rng.Next(), ch);
    ++fixtures;
    // Rational form of min_support for the oracle.
    const uint64_t num = static_cast<uint64_t>(std::llround(p.mining.min_support * 100));
    const auto oracle = testing::BruteForceFrequent(f.pooled, f.tokens, num, 100, 3);
    std::map<std::set<Token>, uint64_t> got, want;
    for (const auto& s : out.catalog.sets) got[s.events] = s.support;
    for (const auto& [s, o] : oracle) want[s] = o.support;
    mismatches += got != want;
    for (const auto& s : out.catalog.sets) {
      for (const auto& m : f.members) {
        std::set<Token> local;
        bool any = false;
        for (const auto& t : sti::BucketTransactions(m.log.records)) {
          if (!std::includes(t.begin(), t.end(), s.events.begin(), s.events.end())) {
            continue;
          }
          if (!any) {
            local = t;
            any = true;
          } else {
            std::set<Token> both;
            std::set_intersection(local.begin(), local.end(), t.begin(), t.end(),
                                  std::inserter(both, both.end()));
            local = std::move(both);
          }
        }
        if (any && !std::includes(local.begin(), local.end(), s.closure.begin(),
                                  s.closure.end())) {
          ++closure_violations;
        }
      }
    }
  }
  std::ostringstream out;
  out << fixtures << " fixtures, " << mismatches << " catalog mismatches, "
      << closure_violations << " closure violations";
  return {mismatches == 0 && closure_violations == 0, out.str()};
}

harness::PipelineResult RunDefault(double leak_fraction, uint64_t seed,
                                   harness::Dataset* dataset_out = nullptr) {
  harness::SynthConfig c;
  c.leak_fraction = leak_fraction;
  c.rng_seed = seed;
  harness::Dataset ds = harness::Synthesize(c);
  auto r = harness::RunPipeline(ds, testing::DefaultParams(seed));
  if (dataset_out) *dataset_out = std::move(ds);
  return r;
}

Outcome Recovery(const harness::PipelineResult& r, const harness::Dataset& ds,
                 double secs) {
  if (!r.complete) return {false, "aborted: " + r.abort_reason};
  const auto m = harness::Evaluate(
      harness::RealGroupsFromJson(harness::GroupsJson(r)), ds.truth.topic_of);
  std::ostringstream out;
  out << "precision " << m.macro_precision << ", recall " << m.macro_recall << ", "
      << secs << " s";
  return {m.macro_precision >= 0.9 && m.macro_recall >= 0.9 && secs < 60.0, out.str()};
}

Outcome Privacy(const harness::PipelineResult& clean, const harness::Dataset& clean_ds) {
  std::ostringstream out;
  bool pass = clean.complete;
  size_t hits = 0;
  for (const Message& m : clean.session->stored_transcripts()) {
    const std::string dump = m.payload.dump() + m.step + m.from + m.to;
    for (const Token& t : clean_ds.truth.sensitive) hits += dump.find(t) != std::string::npos;
  }
  out << "leak 0: " << hits << " raw sensitive hits";
  pass = pass && hits == 0;
  for (double leak : {0.1, 0.3, 0.5}) {
    harness::Dataset ds;
    const auto r = RunDefault(leak, 6006, &ds);
    std::set<Token> leaked;
    for (const auto& [p, tokens] : ds.truth.leaked) leaked.insert(tokens.begin(), tokens.end());
    const auto a = harness::LeakageAttack(r.session->stored_transcripts(), ds.taxonomy,
                                          leaked, ds.truth.sensitive);
    size_t non_hypernym = 0;
    for (const Token& t : a.recovered) {
      if (!leaked.count(t) && ds.taxonomy.Depth(t) > 2) ++non_hypernym;
    }
    out << "; leak " << leak << ": " << a.suppressed_recovered.size()
        << " suppressed recovered, " << non_hypernym << " non-hypernym";
    pass = pass && r.complete && a.suppressed_recovered.empty() && non_hypernym == 0;
  }
  return {pass, out.str()};
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome Determinism(const harness::PipelineResult& first) {
  const auto second = RunDefault(0.0, 5005);
  const auto base = std::filesystem::temp_directory_path() / "concealhunt_acceptance";
  std::filesystem::remove_all(base);
  harness::WriteOutputs(base / "a", first);
  harness::WriteOutputs(base / "b", second);
  bool same = true;
  for (const char* f : {"groups.json", "transcript.jsonl"}) {
    const std::string a = Slurp(base / "a" / f);
    same = same && !a.empty() && a == Slurp(base / "b" / f);
  }
  std::filesystem::remove_all(base);
  return {same, same ? "groups.json and transcript.jsonl identical" : "outputs differ"};
}

Outcome StructuralSweep() {
  Rng rng(8008);
  size_t runs = 0, violations = 0, aborted = 0;
  for (int i = 0; i < 50; ++i) {
    harness::SynthConfig c;
    c.num_gateways = 4 + rng.Below(5);
    c.planted_topics = 1 + rng.Below(3);
    c.days = 8 + rng.Below(8);
    c.events_per_day = 12 + rng.Below(10);
    c.dominance = 0.6 + 0.1 * rng.Below(4);
    c.leak_fraction = 0.1 * rng.Below(4);
    c.rng_seed = rng.Next();
    harness::ProtocolParams p = testing::DefaultParams(rng.Next());
    p.str.theta = 0.1 + 0.05 * rng.Below(3);
    p.sti.mining.min_support = 0.2 + 0.05 * rng.Below(4);
    p.sti.merge.threshold = 0.5 + 0.25 * rng.Below(4);
    p.sti.merge.cohesion_prune = rng.Below(2) == 1;
    const auto r = harness::RunPipeline(harness::Synthesize(c), p);
    ++runs;
    if (!r.complete) {
      ++aborted;
      continue;
    }
    std::set<GatewayId> everyone;
    for (const auto& o : r.sti) {
      std::set<std::set<Token>> events;
      std::set<GatewayId> seen;
      for (const auto& g : o.vc.groups) {
        for (const auto& m : g.members) violations += !seen.insert(m).second;
        violations += !events.insert(g.events).second;
      }
      violations += seen != o.vc.members;
      violations += !SatisfiesDisjointness(o.vc);
      for (const auto& n : o.forest) {
        if (!n.parent) continue;
        const auto& parent = o.forest[*n.parent].group;
        violations += !std::includes(n.group.events.begin(), n.group.events.end(),
                                     parent.events.begin(), parent.events.end());
        violations += parent.level + 1 != n.group.level;
      }
      for (const auto& m : o.vc.members) violations += !everyone.insert(m).second;
    }
    violations += everyone.size() != c.num_gateways;
  }
  std::ostringstream out;
  out << runs << " runs, " << violations << " violations, " << aborted << " aborted";
  return {violations == 0 && aborted == 0 && runs == 50, out.str()};
}

int Report(int n, const std::string& name, const Outcome& o) {
  std::cout << "criterion " << n << " (" << name << "): " << (o.pass ? "PASS" : "FAIL")
            << " [" << o.detail << "]" << std::endl;
  return o.pass ? 0 : 1;
}

}  // namespace
}  // namespace concealhunt

int main() {
  using namespace concealhunt;
  int failures = 0;
  failures += Report(1, "psi exactness", PsiExactness());
  failures += Report(2, "blind signature identity", BlindIdentity());
  failures += Report(3, "commutative peel", CommutativePeel());
  failures += Report(4, "distributed equals centralized mining", DistributedMining());

  harness::Dataset planted;
  const auto start = Clock::now();
  const auto planted_run = RunDefault(0.0, 5005, &planted);
  const double secs = Since(start);
  failures += Report(5, "planted group recovery", Recovery(planted_run, planted, secs));
  failures += Report(6, "privacy", Privacy(planted_run, planted));
  failures += Report(7, "determinism", Determinism(planted_run));
  failures += Report(8, "structural invariants", StructuralSweep());
  std::cout << (failures == 0 ? "all criteria passed" : "some criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
