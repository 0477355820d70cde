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

#ifndef CONCEALHUNT_CANONICAL_H_
#define CONCEALHUNT_CANONICAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "concealhunt/core_model.h"

namespace concealhunt {

// Length-prefixed, field-ordered big-endian binary encoding. Equal values
// always encode to identical bytes; this is what protocol hashes consume.
class Encoder {
 public:
  void PutU8(uint8_t v) { out_.push_back(v); }
  void PutU32(uint32_t v);
  void PutU64(uint64_t v);
  void PutI64(int64_t v) { PutU64(static_cast<uint64_t>(v)); }
  void PutDouble(double v);
  void PutString(std::string_view s);
  void PutBytes(std::span<const uint8_t> b);

  const std::vector<uint8_t>& bytes() const { return out_; }
  std::vector<uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

// Reads what Encoder wrote. Any truncation or overrun throws InvariantError.
class Decoder {
 public:
  explicit Decoder(std::span<const uint8_t> in) : in_(in) {}

  uint8_t GetU8();
  uint32_t GetU32();
  uint64_t GetU64();
  int64_t GetI64() { return static_cast<int64_t>(GetU64()); }
  double GetDouble();
  std::string GetString();
  std::vector<uint8_t> GetBytes();

  bool AtEnd() const { return pos_ == in_.size(); }
  void ExpectEnd() const;

 private:
  void Need(size_t n) const;

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

// Each top-level encoding starts with a one-byte type tag, so values of
// different types never share an encoding.
std::vector<uint8_t> CanonicalEncode(const Event& v);
std::vector<uint8_t> CanonicalEncode(const GatewayId& v);
std::vector<uint8_t> CanonicalEncode(const EventLog& v);
std::vector<uint8_t> CanonicalEncode(const SanitizedLog& v);
std::vector<uint8_t> CanonicalEncode(const TaxonomyTree& v);
std::vector<uint8_t> CanonicalEncode(const EventVector& v);
std::vector<uint8_t> CanonicalEncode(const RealThreatGroup& v);
std::vector<uint8_t> CanonicalEncode(const VirtualThreatGroup& v);
std::vector<uint8_t> CanonicalEncodeToken(const Token& t);

Event DecodeEvent(std::span<const uint8_t> bytes);
GatewayId DecodeGatewayId(std::span<const uint8_t> bytes);
EventLog DecodeEventLog(std::span<const uint8_t> bytes);
SanitizedLog DecodeSanitizedLog(std::span<const uint8_t> bytes);
TaxonomyTree DecodeTaxonomyTree(std::span<const uint8_t> bytes);
EventVector DecodeEventVector(std::span<const uint8_t> bytes);
RealThreatGroup DecodeRealThreatGroup(std::span<const uint8_t> bytes);
VirtualThreatGroup DecodeVirtualThreatGroup(std::span<const uint8_t> bytes);

}  // namespace concealhunt

#endif  // CONCEALHUNT_CANONICAL_H_
