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

#include "concealhunt/canonical.h"

#include <bit>
#include <cstring>

#include "concealhunt/error.h"

namespace concealhunt {

namespace {

enum Tag : uint8_t {
  kTagEvent = 1,
  kTagGateway = 2,
  kTagEventLog = 3,
  kTagSanitizedLog = 4,
  kTagTaxonomy = 5,
  kTagEventVector = 6,
  kTagRealGroup = 7,
  kTagVirtualGroup = 8,
  kTagToken = 9,
};

void PutGateway(Encoder& e, const GatewayId& g) {
  e.PutString(g.pseudonym);
  e.PutU32(g.index);
}

GatewayId GetGateway(Decoder& d) {
  GatewayId g;
  g.pseudonym = d.GetString();
  g.index = d.GetU32();
  return g;
}

void PutEvent(Encoder& e, const Event& ev) {
  e.PutString(ev.event_id);
  e.PutString(ev.device_id);
  e.PutI64(ev.timestamp);
  e.PutU32(static_cast<uint32_t>(ev.attrs.size()));
  for (const auto& [k, v] : ev.attrs) {
    e.PutString(k);
    e.PutString(v);
  }
}

Event GetEvent(Decoder& d) {
  Event ev;
  ev.event_id = d.GetString();
  ev.device_id = d.GetString();
  ev.timestamp = d.GetI64();
  uint32_t n = d.GetU32();
  for (uint32_t i = 0; i < n; ++i) {
    std::string k = d.GetString();
    ev.attrs[k] = d.GetString();
  }
  return ev;
}

void PutRecords(Encoder& e, const std::vector<Event>& records) {
  e.PutU32(static_cast<uint32_t>(records.size()));
  for (const Event& ev : records) PutEvent(e, ev);
}

std::vector<Event> GetRecords(Decoder& d) {
  uint32_t n = d.GetU32();
  std::vector<Event> out;
  out.reserve(n);
  for (uint32_t i = 0; i < n; ++i) out.push_back(GetEvent(d));
  return out;
}

void PutGroup(Encoder& e, const RealThreatGroup& g) {
  e.PutU32(static_cast<uint32_t>(g.events.size()));
  for (const Token& t : g.events) e.PutString(t);
  e.PutU32(static_cast<uint32_t>(g.members.size()));
  for (const GatewayId& m : g.members) PutGateway(e, m);
  e.PutString(g.core_point);
  e.PutU32(g.level);
}

RealThreatGroup GetGroup(Decoder& d) {
  RealThreatGroup g;
  uint32_t n = d.GetU32();
  for (uint32_t i = 0; i < n; ++i) g.events.insert(d.GetString());
  n = d.GetU32();
  for (uint32_t i = 0; i < n; ++i) g.members.insert(GetGateway(d));
  g.core_point = d.GetString();
  g.level = d.GetU32();
  return g;
}

void ExpectTag(Decoder& d, Tag tag) {
  if (d.GetU8() != tag) throw InvariantError("canonical decode: wrong type tag");
}

template <typename T, typename Fn>
std::vector<uint8_t> EncodeChecked(const T& v, Tag tag, Fn&& body) {
  Validate(v);
  Encoder e;
  e.PutU8(tag);
  body(e);
  return e.Take();
}

}  // namespace

void Encoder::PutU32(uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<uint8_t>(v >> s));
}

void Encoder::PutU64(uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<uint8_t>(v >> s));
}

void Encoder::PutDouble(double v) { PutU64(std::bit_cast<uint64_t>(v)); }

void Encoder::PutString(std::string_view s) {
  PutU32(static_cast<uint32_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
}

void Encoder::PutBytes(std::span<const uint8_t> b) {
  PutU32(static_cast<uint32_t>(b.size()));
  out_.insert(out_.end(), b.begin(), b.end());
}

void Decoder::Need(size_t n) const {
  if (in_.size() - pos_ < n) {
    throw InvariantError("canonical decode: truncated input");
  }
}

uint8_t Decoder::GetU8() {
  Need(1);
  return in_[pos_++];
}

uint32_t Decoder::GetU32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

uint64_t Decoder::GetU64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

double Decoder::GetDouble() { return std::bit_cast<double>(GetU64()); }

std::string Decoder::GetString() {
  uint32_t n = GetU32();
  Need(n);
  std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<uint8_t> Decoder::GetBytes() {
  uint32_t n = GetU32();
  Need(n);
  std::vector<uint8_t> b(in_.begin() + pos_, in_.begin() + pos_ + n);
  pos_ += n;
  return b;
}

void Decoder::ExpectEnd() const {
  if (!AtEnd()) throw InvariantError("canonical decode: trailing bytes");
}

std::vector<uint8_t> CanonicalEncodeToken(const Token& t) {
  Encoder e;
  e.PutU8(kTagToken);
  e.PutString(t);
  return e.Take();
}

std::vector<uint8_t> CanonicalEncode(const Event& v) {
  return EncodeChecked(v, kTagEvent, [&](Encoder& e) { PutEvent(e, v); });
}

std::vector<uint8_t> CanonicalEncode(const GatewayId& v) {
  if (v.pseudonym.empty()) throw InvariantError("gateway pseudonym is empty");
  Encoder e;
  e.PutU8(kTagGateway);
  PutGateway(e, v);
  return e.Take();
}

std::vector<uint8_t> CanonicalEncode(const EventLog& v) {
  return EncodeChecked(v, kTagEventLog, [&](Encoder& e) {
    PutGateway(e, v.gateway);
    PutRecords(e, v.records);
  });
}

std::vector<uint8_t> CanonicalEncode(const SanitizedLog& v) {
  return EncodeChecked(v, kTagSanitizedLog, [&](Encoder& e) {
    PutGateway(e, v.gateway);
    PutRecords(e, v.records);
    e.PutU64(v.suppressed_count);
  });
}

std::vector<uint8_t> CanonicalEncode(const TaxonomyTree& v) {
  Encoder e;
  e.PutU8(kTagTaxonomy);
  e.PutString(v.root());
  e.PutU32(static_cast<uint32_t>(v.parents().size()));
  for (const auto& [child, parent] : v.parents()) {
    e.PutString(child);
    e.PutString(parent);
  }
  return e.Take();
}

std::vector<uint8_t> CanonicalEncode(const EventVector& v) {
  return EncodeChecked(v, kTagEventVector, [&](Encoder& e) {
    PutGateway(e, v.owner);
    e.PutU32(static_cast<uint32_t>(v.weights.size()));
    for (const auto& [t, w] : v.weights) {
      e.PutString(t);
      e.PutDouble(w);
    }
    e.PutU64(v.dimension);
  });
}

std::vector<uint8_t> CanonicalEncode(const RealThreatGroup& v) {
  return EncodeChecked(v, kTagRealGroup, [&](Encoder& e) { PutGroup(e, v); });
}

std::vector<uint8_t> CanonicalEncode(const VirtualThreatGroup& v) {
  return EncodeChecked(v, kTagVirtualGroup, [&](Encoder& e) {
    e.PutU32(static_cast<uint32_t>(v.groups.size()));
    for (const RealThreatGroup& g : v.groups) PutGroup(e, g);
    e.PutU32(static_cast<uint32_t>(v.members.size()));
    for (const GatewayId& m : v.members) PutGateway(e, m);
    PutGateway(e, v.trusted_node);
  });
}

Event DecodeEvent(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagEvent);
  Event v = GetEvent(d);
  d.ExpectEnd();
  Validate(v);
  return v;
}

GatewayId DecodeGatewayId(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagGateway);
  GatewayId v = GetGateway(d);
  d.ExpectEnd();
  return v;
}

EventLog DecodeEventLog(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagEventLog);
  EventLog v;
  v.gateway = GetGateway(d);
  v.records = GetRecords(d);
  d.ExpectEnd();
  Validate(v);
  return v;
}

SanitizedLog DecodeSanitizedLog(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagSanitizedLog);
  SanitizedLog v;
  v.gateway = GetGateway(d);
  v.records = GetRecords(d);
  v.suppressed_count = d.GetU64();
  d.ExpectEnd();
  Validate(v);
  return v;
}

TaxonomyTree DecodeTaxonomyTree(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagTaxonomy);
  d.GetString();  // root, re-derived from the pairs
  uint32_t n = d.GetU32();
  std::vector<std::pair<Token, Token>> pairs;
  pairs.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    Token child = d.GetString();
    pairs.emplace_back(std::move(child), d.GetString());
  }
  d.ExpectEnd();
  return TaxonomyTree::FromPairs(pairs);
}

EventVector DecodeEventVector(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagEventVector);
  EventVector v;
  v.owner = GetGateway(d);
  uint32_t n = d.GetU32();
  for (uint32_t i = 0; i < n; ++i) {
    Token t = d.GetString();
    v.weights[t] = d.GetDouble();
  }
  v.dimension = d.GetU64();
  d.ExpectEnd();
  Validate(v);
  return v;
}

RealThreatGroup DecodeRealThreatGroup(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagRealGroup);
  RealThreatGroup v = GetGroup(d);
  d.ExpectEnd();
  Validate(v);
  return v;
}

VirtualThreatGroup DecodeVirtualThreatGroup(std::span<const uint8_t> bytes) {
  Decoder d(bytes);
  ExpectTag(d, kTagVirtualGroup);
  VirtualThreatGroup v;
  uint32_t n = d.GetU32();
  for (uint32_t i = 0; i < n; ++i) v.groups.push_back(GetGroup(d));
  n = d.GetU32();
  for (uint32_t i = 0; i < n; ++i) v.members.insert(GetGateway(d));
  v.trusted_node = GetGateway(d);
  d.ExpectEnd();
  Validate(v);
  return v;
}

}  // namespace concealhunt
