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

#include "concealhunt/str_protocol.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "concealhunt/canonical.h"
#include "concealhunt/error.h"

namespace concealhunt::str {

using nlohmann::json;

namespace {

constexpr const char* kPhase = "str";

std::vector<size_t> CanonicalOrder(std::span<const GatewayId> ids) {
  std::vector<std::string> keys;
  keys.reserve(ids.size());
  for (const GatewayId& g : ids) keys.push_back(PseudonymDigest(g));
  std::vector<size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return keys[a] < keys[b]; });
  return order;
}

}  // namespace

std::string PseudonymDigest(const GatewayId& id) {
  return ToHex(Sha256(id.pseudonym));
}

GatewayId ElectTrustedNode(std::span<const GatewayId> participants) {
  if (participants.empty()) throw InvariantError("no participants");
  return participants[CanonicalOrder(participants).front()];
}

RingTopology FormRing(std::vector<GatewayId> participants, uint64_t run_seed) {
  if (participants.size() < 3) {
    throw InvariantError("a ring needs at least 3 participants");
  }
  std::sort(participants.begin(), participants.end());
  for (size_t i = 1; i < participants.size(); ++i) {
    if (participants[i].pseudonym == participants[i - 1].pseudonym) {
      throw InvariantError("duplicate participant " + participants[i].pseudonym);
    }
  }
  Rng rng = Rng::Derive(run_seed, "str/ring");
  rng.Shuffle(participants);
  RingTopology ring;
  ring.trusted_node = ElectTrustedNode(participants);
  ring.order = std::move(participants);
  return ring;
}

PsiTranscript PsiSession(const GatewayId& c, const std::set<Token>& c_tokens,
                         const GatewayId& d, const std::set<Token>& d_tokens,
                         unsigned key_bits, Rng& c_rng, Rng& d_rng,
                         Channel& channel) {
  PsiTranscript t;
  t.c = c;
  t.d = d;
  t.size_c = c_tokens.size();
  t.size_d = d_tokens.size();

  // C: fresh signing key, public part to D.
  const BlindKeypair key = GenerateBlindKeypair(key_bits, c_rng);
  t.signer_key = key.Public();
  json pub = channel.Deliver(
      {kPhase, "psi.public_key", c.pseudonym, d.pseudonym,
       json{{"n", BigHex(key.modulus)}, {"e", BigHex(key.public_exponent)}}});
  const BlindPublicKey d_view{BigFromHex(pub.at("n").get<std::string>()),
                              BigFromHex(pub.at("e").get<std::string>())};

  // D: hash, blind with a fresh r per event, send B_d in a shuffled order.
  std::vector<Token> d_order(d_tokens.begin(), d_tokens.end());
  d_rng.Shuffle(d_order);
  std::vector<BlindingFactor> factors;
  factors.reserve(d_order.size());
  for (const Token& w : d_order) {
    factors.push_back(NewBlindingFactor(d_view, d_rng));
    t.blinded.push_back(
        Blind(HashToRange(w, d_view.modulus), d_view, factors.back()));
  }
  std::vector<BigInt> c_view_blinded = BigIntsFromJson(channel.Deliver(
      {kPhase, "psi.blinded", d.pseudonym, c.pseudonym, ToJson(t.blinded)}));

  // C: sign B_d element-wise, return in the received order.
  std::vector<BigInt> signed_blinded;
  signed_blinded.reserve(c_view_blinded.size());
  for (const BigInt& b : c_view_blinded) {
    if (b <= 0 || b >= key.modulus) {
      throw ProtocolAbort("psi: blinded value outside Z_N");
    }
    signed_blinded.push_back(Sign(b, key));
  }
  t.signed_blinded = BigIntsFromJson(channel.Deliver(
      {kPhase, "psi.signed", c.pseudonym, d.pseudonym, ToJson(signed_blinded)}));
  if (t.signed_blinded.size() != t.blinded.size()) {
    throw ProtocolAbort("psi: signed sequence length " +
                        std::to_string(t.signed_blinded.size()) +
                        " does not match blinded length " +
                        std::to_string(t.blinded.size()));
  }

  // D: strip the blinding, hash the signatures.
  for (size_t i = 0; i < t.signed_blinded.size(); ++i) {
    BigInt si = Unblind(t.signed_blinded[i], factors[i], d_view.modulus);
    t.hashed_d.insert(HashBigInt(si));
    t.unblinded.push_back(std::move(si));
  }

  // C: sign and hash its own set.
  json sih_c = json::array();
  {
    std::set<std::string> hashed;
    for (const Token& w : c_tokens) {
      hashed.insert(HashBigInt(Sign(HashToRange(w, key.modulus), key)));
    }
    for (const std::string& h : hashed) sih_c.push_back(h);
  }
  json delivered = channel.Deliver(
      {kPhase, "psi.hashed_signatures", c.pseudonym, d.pseudonym, sih_c});
  for (const json& h : delivered) t.hashed_c.insert(h.get<std::string>());
  if (t.hashed_c.size() != delivered.size()) {
    throw ProtocolAbort("psi: duplicate values in SIH_c");
  }

  // D: intersection.
  std::set_intersection(t.hashed_c.begin(), t.hashed_c.end(),
                        t.hashed_d.begin(), t.hashed_d.end(),
                        std::inserter(t.intersection, t.intersection.end()));
  t.complete = true;
  return t;
}

Envelope SubmitReport(const PsiTranscript& transcript,
                      const GatewayId& trusted_node,
                      const std::array<uint8_t, 32>& trusted_public_key,
                      Rng& d_rng) {
  if (!transcript.complete) {
    throw InvariantError("report refused: transcript is incomplete");
  }
  json in_digests = json::array();
  for (const std::string& x : transcript.intersection) {
    in_digests.push_back(ToHex(Sha256(FromHex(x))));
  }
  json payload{
      {"pseudonyms", {transcript.c.pseudonym, transcript.d.pseudonym}},
      {"in_digests", in_digests},
      {"size_c", transcript.size_c},
      {"size_d", transcript.size_d},
  };
  const std::string bytes = payload.dump();
  return EnvelopeSeal(
      std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(bytes.data()),
                               bytes.size()),
      trusted_node, trusted_public_key, d_rng);
}

SimilarityReport OpenReport(const Envelope& envelope,
                            const BoxKeypair& trusted_keypair) {
  const Bytes plain = EnvelopeOpen(envelope, trusted_keypair);
  json j;
  try {
    j = json::parse(plain.begin(), plain.end());
  } catch (const json::exception& e) {
    throw ProtocolAbort(std::string("report: malformed payload: ") + e.what());
  }
  SimilarityReport r;
  r.c = j.at("pseudonyms").at(0).get<std::string>();
  r.d = j.at("pseudonyms").at(1).get<std::string>();
  r.in_digests = j.at("in_digests").get<std::vector<std::string>>();
  r.intersection_size = r.in_digests.size();
  r.size_c = j.at("size_c").get<uint64_t>();
  r.size_d = j.at("size_d").get<uint64_t>();
  if (r.intersection_size > std::min(r.size_c, r.size_d)) {
    throw ProtocolAbort("report: intersection larger than either set");
  }
  // Same arithmetic as weighting's GatewaysSimilarity.
  const double denom = static_cast<double>(r.size_c) * r.size_c +
                       static_cast<double>(r.size_d) * r.size_d;
  r.similarity = denom == 0.0 ? 0.0 : 2.0 * r.intersection_size / denom;
  return r;
}

SimilarityMatrix AggregateSimilarities(std::span<const GatewayId> participants,
                                       std::span<const Envelope> reports,
                                       const BoxKeypair& trusted_keypair) {
  const size_t n = participants.size();
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < n; ++i) index[participants[i].pseudonym] = i;

  SimilarityMatrix m;
  m.gateways.assign(participants.begin(), participants.end());
  m.squared = Eigen::MatrixXd::Zero(n, n);
  m.classic = Eigen::MatrixXd::Zero(n, n);
  m.sizes.assign(n, 0);
  std::vector<bool> size_known(n, false);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);

  auto record_size = [&](size_t i, uint64_t size) {
    if (size_known[i] && m.sizes[i] != size) {
      throw ProtocolAbort("reports disagree on |V| of " +
                          participants[i].pseudonym);
    }
    size_known[i] = true;
    m.sizes[i] = size;
  };

  for (const Envelope& env : reports) {
    SimilarityReport r = OpenReport(env, trusted_keypair);
    auto ic = index.find(r.c);
    auto id = index.find(r.d);
    if (ic == index.end() || id == index.end() || ic->second == id->second) {
      throw ProtocolAbort("report for an unknown pair " + r.c + "/" + r.d);
    }
    const size_t i = ic->second;
    const size_t j = id->second;
    if (seen(i, j)) throw ProtocolAbort("duplicate report for " + r.c + "/" + r.d);
    seen(i, j) = seen(j, i) = true;
    record_size(i, r.size_c);
    record_size(j, r.size_d);
    m.squared(i, j) = m.squared(j, i) = r.similarity;
    m.classic(i, j) = m.classic(j, i) =
        r.size_c + r.size_d == 0
            ? 0.0
            : 2.0 * r.intersection_size / static_cast<double>(r.size_c + r.size_d);
    ++m.reports_consumed;
  }

  std::ostringstream missing;
  size_t missing_count = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (!seen(i, j)) {
        missing << (missing_count++ ? ", " : "") << participants[i].pseudonym
                << "/" << participants[j].pseudonym;
      }
    }
  }
  if (missing_count > 0) {
    throw ProtocolAbort("missing reports for " + std::to_string(missing_count) +
                        " pair(s): " + missing.str());
  }
  for (size_t i = 0; i < n; ++i) {
    // 2|V| / (2|V|^2) and 2|V| / 2|V|.
    m.squared(i, i) = m.sizes[i] == 0 ? 0.0 : 1.0 / static_cast<double>(m.sizes[i]);
    m.classic(i, i) = m.sizes[i] == 0 ? 0.0 : 1.0;
  }
  return m;
}

std::vector<VirtualThreatGroup> SSeedsCluster(const Eigen::MatrixXd& matrix,
                                              std::span<const GatewayId> ids,
                                              double theta,
                                              size_t max_groups) {
  if (!(theta > 0.0)) throw InvariantError("theta must be positive");
  const size_t n = ids.size();
  if (static_cast<size_t>(matrix.rows()) != n ||
      static_cast<size_t>(matrix.cols()) != n) {
    throw InvariantError("similarity matrix does not match the gateway list");
  }
  if (n > 0 && (matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvariantError("similarity matrix is not symmetric");
  }
  std::vector<VirtualThreatGroup> groups;
  if (n == 0) return groups;

  // Everything below walks gateways in canonical (digest) order so the
  // partition does not depend on the input order.
  const std::vector<size_t> canon = CanonicalOrder(ids);
  std::vector<bool> assigned(n, false);
  std::vector<std::vector<size_t>> members;
  size_t remaining = n;

  while (remaining > 0) {
    if (max_groups > 0 && members.size() == max_groups) {
      for (size_t u : canon) {
        if (assigned[u]) continue;
        size_t best = 0;
        double best_mean = -1.0;
        for (size_t g = 0; g < members.size(); ++g) {
          double sum = 0.0;
          for (size_t v : members[g]) sum += matrix(u, v);
          const double mean = sum / members[g].size();
          if (mean > best_mean) {
            best_mean = mean;
            best = g;
          }
        }
        members[best].push_back(u);
      }
      break;
    }
    size_t seed = n;
    double best_total = -1.0;
    for (size_t u : canon) {
      if (assigned[u]) continue;
      double total = 0.0;
      for (size_t v : canon) {
        if (v != u && !assigned[v]) total += matrix(u, v);
      }
      if (total > best_total) {
        best_total = total;
        seed = u;
      }
    }
    std::vector<size_t> group{seed};
    assigned[seed] = true;
    --remaining;
    for (size_t v : canon) {
      if (!assigned[v] && matrix(seed, v) >= theta) {
        group.push_back(v);
        assigned[v] = true;
        --remaining;
      }
    }
    members.push_back(std::move(group));
  }

  for (const auto& g : members) {
    VirtualThreatGroup vc;
    std::vector<GatewayId> list;
    for (size_t i : g) {
      vc.members.insert(ids[i]);
      list.push_back(ids[i]);
    }
    vc.trusted_node = ElectTrustedNode(list);
    groups.push_back(std::move(vc));
  }
  return groups;
}

Result Run(std::span<const Participant> participants, const Params& params,
           uint64_t seed, Channel& channel) {
  std::vector<GatewayId> ids;
  for (const Participant& p : participants) ids.push_back(p.id);
  Result result;
  result.ring = FormRing(ids, seed);

  std::vector<size_t> by_index(participants.size());
  std::iota(by_index.begin(), by_index.end(), 0);
  std::sort(by_index.begin(), by_index.end(), [&](size_t a, size_t b) {
    return participants[a].id < participants[b].id;
  });
  const Participant* trusted = nullptr;
  for (const Participant& p : participants) {
    if (p.id == result.ring.trusted_node) trusted = &p;
  }

  // Trusted node announces its envelope key.
  std::map<std::string, std::array<uint8_t, 32>> trusted_key_view;
  for (const Participant& p : participants) {
    if (p.id == trusted->id) continue;
    json got = channel.Deliver(
        {kPhase, "trusted_key", trusted->id.pseudonym, p.id.pseudonym,
         json{{"trusted_node", trusted->id.pseudonym},
              {"public_key", ToHex(trusted->box.public_key)}}});
    Bytes pk = FromHex(got.at("public_key").get<std::string>());
    std::array<uint8_t, 32> key{};
    if (pk.size() != key.size()) throw ProtocolAbort("bad trusted node key");
    std::copy(pk.begin(), pk.end(), key.begin());
    trusted_key_view[p.id.pseudonym] = key;
  }
  trusted_key_view[trusted->id.pseudonym] = trusted->box.public_key;

  std::vector<Envelope> delivered_reports;
  for (size_t a = 0; a < by_index.size(); ++a) {
    for (size_t b = a + 1; b < by_index.size(); ++b) {
      const Participant& c = participants[by_index[a]];
      const Participant& d = participants[by_index[b]];
      const std::string label = "str/psi/" + std::to_string(c.id.index) + "/" +
                                std::to_string(d.id.index);
      Rng c_rng = Rng::Derive(seed, label + "/c");
      Rng d_rng = Rng::Derive(seed, label + "/d");
      PsiTranscript t = PsiSession(c.id, c.tokens, d.id, d.tokens,
                                   params.key_bits, c_rng, d_rng, channel);
      Envelope env = SubmitReport(t, trusted->id,
                                  trusted_key_view.at(d.id.pseudonym), d_rng);
      json got = channel.Deliver({kPhase, "report", d.id.pseudonym,
                                  trusted->id.pseudonym, ToJson(env)});
      delivered_reports.push_back(EnvelopeFromJson(got, trusted->id));
      result.transcripts.push_back(std::move(t));
    }
  }

  std::vector<GatewayId> ordered;
  for (size_t i : by_index) ordered.push_back(participants[i].id);
  result.matrix = AggregateSimilarities(ordered, delivered_reports, trusted->box);
  result.groups = SSeedsCluster(result.matrix.squared, result.matrix.gateways,
                                params.theta, params.max_groups);

  json summary = json::array();
  for (size_t g = 0; g < result.groups.size(); ++g) {
    const VirtualThreatGroup& vc = result.groups[g];
    json members = json::array();
    for (const GatewayId& m : vc.members) members.push_back(m.pseudonym);
    json entry{{"group", g},
               {"members", members},
               {"trusted_node", vc.trusted_node.pseudonym}};
    for (const GatewayId& m : vc.members) {
      if (m == trusted->id) continue;
      channel.Deliver(
          {kPhase, "membership", trusted->id.pseudonym, m.pseudonym, entry});
    }
    summary.push_back(std::move(entry));
  }
  channel.Deliver({kPhase, "virtual_groups", trusted->id.pseudonym, kCtiAddress,
                   json{{"groups", summary}}});
  return result;
}

}  // namespace concealhunt::str
