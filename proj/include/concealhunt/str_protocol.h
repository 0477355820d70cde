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

#ifndef CONCEALHUNT_STR_PROTOCOL_H_
#define CONCEALHUNT_STR_PROTOCOL_H_

#include <Eigen/Dense>

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "concealhunt/channel.h"
#include "concealhunt/core_model.h"
#include "concealhunt/crypto.h"

// First-stage concealment: pairwise private intersection of hashed
// sanitized token sets, similarity aggregation at an elected trusted node,
// and seed-expansion clustering into virtual threat groups.
namespace concealhunt::str {

struct RingTopology {
  std::vector<GatewayId> order;
  GatewayId trusted_node;
};

// Participant whose pseudonym digest is lexicographically smallest.
GatewayId ElectTrustedNode(std::span<const GatewayId> participants);
// Hex SHA-256 of the pseudonym; the canonical ordering key for gateways.
std::string PseudonymDigest(const GatewayId& id);

// Seeded shuffle of the participants plus the elected trusted node.
// Throws InvariantError for fewer than 3 participants or duplicates.
RingTopology FormRing(std::vector<GatewayId> participants, uint64_t run_seed);

// Full message trace of one C <-> D exchange. C signs; D learns |IN|.
struct PsiTranscript {
  GatewayId c;
  GatewayId d;
  BlindPublicKey signer_key;
  std::vector<BigInt> blinded;         // B_d
  std::vector<BigInt> signed_blinded;  // S_d
  std::vector<BigInt> unblinded;       // SI_d (local to D)
  std::set<std::string> hashed_d;      // SIH_d
  std::set<std::string> hashed_c;      // SIH_c
  std::set<std::string> intersection;  // IN_{C,D}
  uint64_t size_c = 0;
  uint64_t size_d = 0;
  bool complete = false;
};

// Runs the exchange over channel. Each side only touches its own tokens;
// C's keypair is fresh per session. Throws ProtocolAbort when a returned
// sequence does not match what was sent.
PsiTranscript PsiSession(const GatewayId& c, const std::set<Token>& c_tokens,
                         const GatewayId& d, const std::set<Token>& d_tokens,
                         unsigned key_bits, Rng& c_rng, Rng& d_rng,
                         Channel& channel);

struct SimilarityReport {
  std::string c;  // pseudonyms
  std::string d;
  uint64_t intersection_size = 0;
  uint64_t size_c = 0;
  uint64_t size_d = 0;
  std::vector<std::string> in_digests;
  double similarity = 0.0;
};

// D seals {pseudonyms, in_digests, size_c, size_d} to the trusted node.
// Refuses (InvariantError) an incomplete transcript.
Envelope SubmitReport(const PsiTranscript& transcript,
                      const GatewayId& trusted_node,
                      const std::array<uint8_t, 32>& trusted_public_key,
                      Rng& d_rng);
SimilarityReport OpenReport(const Envelope& envelope,
                            const BoxKeypair& trusted_keypair);

struct SimilarityMatrix {
  std::vector<GatewayId> gateways;  // row/column order
  Eigen::MatrixXd squared;          // 2|∩| / (|Vc|^2 + |Vd|^2)
  Eigen::MatrixXd classic;          // 2|∩| / (|Vc| + |Vd|)
  std::vector<uint64_t> sizes;      // |V| per gateway
  size_t reports_consumed = 0;
};

// Opens one report per unordered pair. Missing or duplicate pairs raise
// ProtocolAbort (the message lists the missing pairs).
SimilarityMatrix AggregateSimilarities(std::span<const GatewayId> participants,
                                       std::span<const Envelope> reports,
                                       const BoxKeypair& trusted_keypair);

// Seed-expansion clustering. Repeatedly picks the unassigned gateway with
// the largest total similarity to the other unassigned gateways (ties go to
// the smaller pseudonym digest) and attaches every unassigned gateway whose
// similarity to the seed is >= theta. max_groups = 0 means unbounded; once
// the bound is reached the remaining gateways join the group with the
// highest mean similarity. Output groups carry membership only.
std::vector<VirtualThreatGroup> SSeedsCluster(const Eigen::MatrixXd& matrix,
                                              std::span<const GatewayId> ids,
                                              double theta,
                                              size_t max_groups = 0);

struct Participant {
  GatewayId id;
  std::set<Token> tokens;  // nonzero-weight tokens of the event vector
  BoxKeypair box;
};

struct Params {
  unsigned key_bits = 512;
  double theta = 0.15;
  size_t max_groups = 0;
};

struct Result {
  RingTopology ring;
  std::vector<PsiTranscript> transcripts;  // canonical pair order
  SimilarityMatrix matrix;
  std::vector<VirtualThreatGroup> groups;
};

// The whole first stage over channel: trusted key broadcast, every pairwise
// session in index order, report submission, aggregation, clustering and
// membership notification.
Result Run(std::span<const Participant> participants, const Params& params,
           uint64_t seed, Channel& channel);

}  // namespace concealhunt::str

#endif  // CONCEALHUNT_STR_PROTOCOL_H_
