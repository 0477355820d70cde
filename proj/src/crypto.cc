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

#include "concealhunt/crypto.h"

#include <sodium.h>

#include <algorithm>
#include <cstring>

#include "concealhunt/canonical.h"
#include "concealhunt/error.h"

namespace concealhunt {

namespace {

void EnsureSodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw CryptoError("libsodium initialization failed");
}

// Safe primes p = 2q + 1. The 1024 and 2048-bit values are the RFC 2409
// group 2 and RFC 3526 group 14 MODP primes.
constexpr const char* kPrime512 =
    "800000000000000000000000000000000000157ee2de15fd7333af23d76e19c9"
    "9051cfd1fd3f170000000000000000000000000000000000000000000002c513";
constexpr const char* kPrime1024 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE65381FFFFFFFFFFFFFFFF";
constexpr const char* kPrime2048 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

constexpr uint8_t kChunkMarker = 0x01;
constexpr size_t kCheckBytes = 4;

size_t ElementBytes(const CommutativeGroup& g) { return (g.bits - 2) / 8 + 1; }

}  // namespace

Digest Sha256(std::span<const uint8_t> data) {
  EnsureSodium();
  Digest d;
  crypto_hash_sha256(d.data(), data.data(), data.size());
  return d;
}

Digest Sha256(std::string_view data) {
  return Sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

std::string ToHex(std::span<const uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw InvariantError("hex: odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InvariantError("hex: invalid digit");
  };
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 |
                                  nibble(hex[2 * i + 1]));
  }
  return out;
}

Digest TokenDigest(const Token& token) {
  return Sha256(CanonicalEncodeToken(token));
}

std::string TokenDigestHex(const Token& token) {
  return ToHex(TokenDigest(token));
}

uint64_t TokenId(const Token& token) {
  Digest d = TokenDigest(token);
  uint64_t id = 0;
  for (int i = 0; i < 8; ++i) id = (id << 8) | d[i];
  return id;
}

std::string TokenIdHex(uint64_t id) {
  std::array<uint8_t, 8> b;
  for (int i = 7; i >= 0; --i, id >>= 8) b[i] = static_cast<uint8_t>(id);
  return ToHex(b);
}

BigInt HashToRange(const Token& token, const BigInt& n) {
  // Counter-mode expansion to |n| + 128 bits, then reduction.
  const Bytes input = CanonicalEncodeToken(token);
  const size_t want = (BitLength(n) + 128 + 7) / 8;
  Bytes stream;
  for (uint32_t counter = 0; stream.size() < want; ++counter) {
    Encoder e;
    e.PutString("concealhunt/h2r");
    e.PutU32(counter);
    e.PutBytes(input);
    Digest d = Sha256(e.bytes());
    stream.insert(stream.end(), d.begin(), d.end());
  }
  stream.resize(want);
  BigInt x = FromBytes(stream) % n;
  if (x == 0) x = 1;
  return x;
}

std::string HashBigInt(const BigInt& x) { return ToHex(Sha256(ToBytes(x))); }

BigInt RandomBits(Rng& rng, size_t bits) {
  Bytes b = rng.Bytes((bits + 7) / 8);
  if (bits % 8 != 0 && !b.empty()) b[0] &= static_cast<uint8_t>((1u << (bits % 8)) - 1);
  return FromBytes(b);
}

BigInt RandomRange(Rng& rng, const BigInt& lo, const BigInt& hi) {
  if (hi <= lo) throw InvariantError("RandomRange: empty range");
  BigInt span = hi - lo;
  const size_t bits = BitLength(span);
  BigInt x;
  do {
    x = RandomBits(rng, bits);
  } while (x >= span);
  return lo + x;
}

BigInt PowMod(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

BigInt InvertMod(const BigInt& x, const BigInt& mod) {
  BigInt out;
  if (mpz_invert(out.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw CryptoError("value has no modular inverse");
  }
  return out;
}

Bytes ToBytes(const BigInt& x) {
  size_t count = 0;
  Bytes out((mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
  out.resize(count);
  return out;
}

BigInt FromBytes(std::span<const uint8_t> bytes) {
  BigInt x;
  mpz_import(x.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return x;
}

std::string BigHex(const BigInt& x) { return x.get_str(16); }

BigInt BigFromHex(std::string_view hex) {
  BigInt x;
  if (hex.empty() || x.set_str(std::string(hex), 16) != 0) {
    throw InvariantError("invalid big integer hex");
  }
  return x;
}

size_t BitLength(const BigInt& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

bool IsSupportedKeySize(unsigned bits) {
  return bits == 512 || bits == 1024 || bits == 2048;
}

BlindKeypair GenerateBlindKeypair(unsigned bits, Rng& rng) {
  if (!IsSupportedKeySize(bits)) {
    throw ConfigError("unsupported key size " + std::to_string(bits));
  }
  const BigInt e = 65537;
  const size_t half = bits / 2;
  auto prime = [&]() {
    BigInt p;
    do {
      BigInt x = RandomBits(rng, half);
      mpz_setbit(x.get_mpz_t(), half - 1);
      mpz_setbit(x.get_mpz_t(), half - 2);
      mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
    } while (BitLength(p) != half || gcd(BigInt(p - 1), e) != 1);
    return p;
  };
  while (true) {
    BigInt p = prime();
    BigInt q = prime();
    if (p == q) continue;
    BlindKeypair key = MakeBlindKeypair(p, q, e);
    if (BitLength(key.modulus) != bits) continue;
    key.bits = bits;
    return key;
  }
}

BlindKeypair MakeBlindKeypair(BigInt p, BigInt q, BigInt e) {
  BlindKeypair key;
  key.modulus = p * q;
  key.public_exponent = e;
  key.private_exponent = InvertMod(e, BigInt((p - 1) * (q - 1)));
  key.bits = 0;
  return key;
}

BlindingFactor NewBlindingFactor(const BlindPublicKey& key, Rng& rng) {
  while (true) {
    BigInt r = RandomRange(rng, 2, key.modulus);
    if (gcd(r, key.modulus) == 1) return MakeBlindingFactor(r, key.modulus);
  }
}

BlindingFactor MakeBlindingFactor(const BigInt& r, const BigInt& modulus) {
  return {r, InvertMod(r, modulus)};
}

BigInt Blind(const BigInt& m, const BlindPublicKey& key,
             const BlindingFactor& r) {
  BigInt re = PowMod(r.r, key.exponent, key.modulus);
  return BigInt(m * re) % key.modulus;
}

BigInt Sign(const BigInt& x, const BlindKeypair& key) {
  return PowMod(x, key.private_exponent, key.modulus);
}

BigInt Unblind(const BigInt& s, const BlindingFactor& r,
               const BigInt& modulus) {
  return BigInt(s * r.r_inv) % modulus;
}

bool Verify(const BigInt& message, const BigInt& signature,
            const BlindPublicKey& key) {
  return PowMod(signature, key.exponent, key.modulus) == message % key.modulus;
}

const CommutativeGroup& CommutativeGroup::ForBits(unsigned bits) {
  static const CommutativeGroup g512{BigFromHex(kPrime512), 512};
  static const CommutativeGroup g1024{BigFromHex(kPrime1024), 1024};
  static const CommutativeGroup g2048{BigFromHex(kPrime2048), 2048};
  switch (bits) {
    case 512:
      return g512;
    case 1024:
      return g1024;
    case 2048:
      return g2048;
  }
  throw ConfigError("unsupported commutative group size " +
                    std::to_string(bits));
}

size_t CommutativeGroup::ChunkCapacity() const {
  return ElementBytes(*this) - 2;
}

CommutativeKey GenerateCommutativeKey(const CommutativeGroup& group,
                                      Rng& rng) {
  const BigInt order = group.prime - 1;
  while (true) {
    BigInt k = RandomRange(rng, 3, order);
    if (gcd(k, order) != 1) continue;
    return {group.prime, k, InvertMod(k, order)};
  }
}

BigInt CommEncrypt(const BigInt& x, const CommutativeKey& key) {
  if (x <= 0 || x >= key.prime) {
    throw CryptoError("commutative cipher: value outside the group");
  }
  return PowMod(x, key.exponent, key.prime);
}

BigInt CommDecrypt(const BigInt& y, const CommutativeKey& key) {
  if (y <= 0 || y >= key.prime) {
    throw CryptoError("commutative cipher: value outside the group");
  }
  return PowMod(y, key.inverse, key.prime);
}

std::vector<BigInt> EmbedRecord(std::span<const uint8_t> record,
                                const CommutativeGroup& group) {
  Bytes framed(record.begin(), record.end());
  Digest check = Sha256(record);
  framed.insert(framed.end(), check.begin(), check.begin() + kCheckBytes);

  const size_t cap = group.ChunkCapacity();
  const size_t width = ElementBytes(group);
  std::vector<BigInt> out;
  for (size_t off = 0; off < framed.size(); off += cap) {
    const size_t len = std::min(cap, framed.size() - off);
    Bytes element(width, 0);
    element[0] = kChunkMarker;
    element[1] = static_cast<uint8_t>(len);
    std::copy_n(framed.begin() + off, len, element.begin() + 2);
    out.push_back(FromBytes(element));
  }
  return out;
}

Bytes ExtractRecord(const std::vector<BigInt>& elements,
                    const CommutativeGroup& group) {
  const size_t width = ElementBytes(group);
  const size_t cap = group.ChunkCapacity();
  Bytes framed;
  for (const BigInt& x : elements) {
    Bytes raw = ToBytes(x);
    if (raw.size() != width || raw[0] != kChunkMarker || raw[1] > cap) {
      throw CryptoError("record still carries a cipher layer");
    }
    const size_t len = raw[1];
    if (!std::all_of(raw.begin() + 2 + len, raw.end(),
                     [](uint8_t b) { return b == 0; })) {
      throw CryptoError("record still carries a cipher layer");
    }
    framed.insert(framed.end(), raw.begin() + 2, raw.begin() + 2 + len);
  }
  if (framed.size() < kCheckBytes) {
    throw CryptoError("record still carries a cipher layer");
  }
  Bytes record(framed.begin(), framed.end() - kCheckBytes);
  Digest check = Sha256(record);
  if (!std::equal(check.begin(), check.begin() + kCheckBytes,
                  framed.end() - kCheckBytes)) {
    throw CryptoError("record still carries a cipher layer");
  }
  return record;
}

BoxKeypair GenerateBoxKeypair(Rng& rng) {
  EnsureSodium();
  std::array<uint8_t, crypto_box_SEEDBYTES> seed;
  rng.Fill(seed);
  BoxKeypair kp;
  crypto_box_seed_keypair(kp.public_key.data(), kp.secret_key.data(),
                          seed.data());
  sodium_memzero(seed.data(), seed.size());
  return kp;
}

namespace {

std::array<uint8_t, crypto_box_NONCEBYTES> EnvelopeNonce(
    const uint8_t* ephemeral_pk, const uint8_t* recipient_pk) {
  std::array<uint8_t, crypto_box_NONCEBYTES> nonce;
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, nonce.size());
  crypto_generichash_update(&st, ephemeral_pk, crypto_box_PUBLICKEYBYTES);
  crypto_generichash_update(&st, recipient_pk, crypto_box_PUBLICKEYBYTES);
  crypto_generichash_final(&st, nonce.data(), nonce.size());
  return nonce;
}

}  // namespace

Envelope EnvelopeSeal(std::span<const uint8_t> payload,
                      const GatewayId& recipient,
                      const std::array<uint8_t, 32>& recipient_public_key,
                      Rng& rng) {
  BoxKeypair ephemeral = GenerateBoxKeypair(rng);
  auto nonce = EnvelopeNonce(ephemeral.public_key.data(),
                             recipient_public_key.data());
  Envelope env;
  env.recipient = recipient;
  env.ciphertext.resize(crypto_box_PUBLICKEYBYTES + crypto_box_MACBYTES +
                        payload.size());
  std::copy(ephemeral.public_key.begin(), ephemeral.public_key.end(),
            env.ciphertext.begin());
  if (crypto_box_easy(env.ciphertext.data() + crypto_box_PUBLICKEYBYTES,
                      payload.data(), payload.size(), nonce.data(),
                      recipient_public_key.data(),
                      ephemeral.secret_key.data()) != 0) {
    throw CryptoError("envelope: sealing failed");
  }
  sodium_memzero(ephemeral.secret_key.data(), ephemeral.secret_key.size());
  return env;
}

Bytes EnvelopeOpen(const Envelope& envelope, const BoxKeypair& keypair) {
  EnsureSodium();
  const Bytes& c = envelope.ciphertext;
  if (c.size() < crypto_box_PUBLICKEYBYTES + crypto_box_MACBYTES) {
    throw CryptoError("envelope: ciphertext too short");
  }
  auto nonce = EnvelopeNonce(c.data(), keypair.public_key.data());
  Bytes out(c.size() - crypto_box_PUBLICKEYBYTES - crypto_box_MACBYTES);
  if (crypto_box_open_easy(out.data(), c.data() + crypto_box_PUBLICKEYBYTES,
                           c.size() - crypto_box_PUBLICKEYBYTES, nonce.data(),
                           c.data(), keypair.secret_key.data()) != 0) {
    throw CryptoError("envelope: authentication failed (wrong key?)");
  }
  return out;
}

}  // namespace concealhunt
