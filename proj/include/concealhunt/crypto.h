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

#ifndef CONCEALHUNT_CRYPTO_H_
#define CONCEALHUNT_CRYPTO_H_

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "concealhunt/core_model.h"
#include "concealhunt/rng.h"

namespace concealhunt {

using BigInt = mpz_class;
using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

Digest Sha256(std::span<const uint8_t> data);
Digest Sha256(std::string_view data);
std::string ToHex(std::span<const uint8_t> data);
Bytes FromHex(std::string_view hex);

// h(token): digest of the canonical token encoding. Identical on every party.
Digest TokenDigest(const Token& token);
std::string TokenDigestHex(const Token& token);
// First 8 bytes of TokenDigest, used as a compact event identifier inside
// commutatively encrypted catalogs.
uint64_t TokenId(const Token& token);
std::string TokenIdHex(uint64_t id);

// Full-domain hash of a token into [1, n).
BigInt HashToRange(const Token& token, const BigInt& n);
// H(x): digest of the big-endian encoding of x, as hex.
std::string HashBigInt(const BigInt& x);

// ---------------------------------------------------------------------------
// Big integer helpers
// ---------------------------------------------------------------------------

BigInt RandomBits(Rng& rng, size_t bits);
// Uniform in [lo, hi).
BigInt RandomRange(Rng& rng, const BigInt& lo, const BigInt& hi);
BigInt PowMod(const BigInt& base, const BigInt& exp, const BigInt& mod);
BigInt InvertMod(const BigInt& x, const BigInt& mod);  // throws if no inverse
Bytes ToBytes(const BigInt& x);
BigInt FromBytes(std::span<const uint8_t> bytes);
std::string BigHex(const BigInt& x);
BigInt BigFromHex(std::string_view hex);
size_t BitLength(const BigInt& x);

// ---------------------------------------------------------------------------
// Blind RSA signatures
// ---------------------------------------------------------------------------

struct BlindPublicKey {
  BigInt modulus;   // N
  BigInt exponent;  // E
};

struct BlindKeypair {
  BigInt modulus;           // N
  BigInt public_exponent;   // E
  BigInt private_exponent;  // U
  unsigned bits = 0;

  BlindPublicKey Public() const { return {modulus, public_exponent}; }
};

bool IsSupportedKeySize(unsigned bits);
// bits must be one of 512, 1024, 2048.
BlindKeypair GenerateBlindKeypair(unsigned bits, Rng& rng);
// Fixed small key for known-answer tests; bits = 0.
BlindKeypair MakeBlindKeypair(BigInt p, BigInt q, BigInt e);

struct BlindingFactor {
  BigInt r;
  BigInt r_inv;
};

// Draws r in (1, N) coprime to N. Non-coprime draws are discarded.
BlindingFactor NewBlindingFactor(const BlindPublicKey& key, Rng& rng);
BlindingFactor MakeBlindingFactor(const BigInt& r, const BigInt& modulus);

// m * r^E mod N.
BigInt Blind(const BigInt& m, const BlindPublicKey& key,
             const BlindingFactor& r);
// x^U mod N.
BigInt Sign(const BigInt& x, const BlindKeypair& key);
// s * r^-1 mod N.
BigInt Unblind(const BigInt& s, const BlindingFactor& r, const BigInt& modulus);
bool Verify(const BigInt& message, const BigInt& signature,
            const BlindPublicKey& key);

// ---------------------------------------------------------------------------
// Commutative (Pohlig-Hellman) exponentiation cipher
// ---------------------------------------------------------------------------

// A public safe prime p shared by every party of a ring.
struct CommutativeGroup {
  BigInt prime;
  unsigned bits = 0;

  // Fixed published groups for 512, 1024 and 2048 bits.
  static const CommutativeGroup& ForBits(unsigned bits);
  // Bytes of payload that fit in a single element.
  size_t ChunkCapacity() const;
};

struct CommutativeKey {
  BigInt prime;
  BigInt exponent;      // k, gcd(k, p - 1) = 1
  BigInt inverse;       // k^-1 mod (p - 1)
};

CommutativeKey GenerateCommutativeKey(const CommutativeGroup& group, Rng& rng);
BigInt CommEncrypt(const BigInt& x, const CommutativeKey& key);
BigInt CommDecrypt(const BigInt& y, const CommutativeKey& key);

// Splits a record into group elements carrying a tag and a checksum.
// ExtractRecord throws CryptoError if any element still carries a cipher
// layer (tag or checksum mismatch).
std::vector<BigInt> EmbedRecord(std::span<const uint8_t> record,
                                const CommutativeGroup& group);
Bytes ExtractRecord(const std::vector<BigInt>& elements,
                    const CommutativeGroup& group);

// ---------------------------------------------------------------------------
// Sealed envelopes to a recipient's public key
// ---------------------------------------------------------------------------

struct BoxKeypair {
  std::array<uint8_t, 32> public_key{};
  std::array<uint8_t, 32> secret_key{};
};

BoxKeypair GenerateBoxKeypair(Rng& rng);

struct Envelope {
  GatewayId recipient;
  Bytes ciphertext;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// Ephemeral key material comes from rng, so sealing replays bit-identically.
Envelope EnvelopeSeal(std::span<const uint8_t> payload,
                      const GatewayId& recipient,
                      const std::array<uint8_t, 32>& recipient_public_key,
                      Rng& rng);
// Throws CryptoError when the key does not match or the ciphertext was
// altered.
Bytes EnvelopeOpen(const Envelope& envelope, const BoxKeypair& keypair);

}  // namespace concealhunt

#endif  // CONCEALHUNT_CRYPTO_H_
