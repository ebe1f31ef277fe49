// Copyright 2026 The pufota Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.

#include "pufota/wire.hpp"

#include <openssl/crypto.h>

#include <algorithm>

#include "pufota/error.hpp"

namespace pufota::wire {
namespace {

using crypto::CryptoProfile;
using crypto::ProfileId;

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  ByteView take(std::size_t n) {
    if (data_.size() - pos_ < n) throw DecodeError("truncated message body");
    ByteView out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t le(std::size_t width) { return get_le(take(width), width); }
  template <std::size_t N>
  std::array<std::uint8_t, N> array() {
    std::array<std::uint8_t, N> out{};
    const ByteView b = take(N);
    std::copy(b.begin(), b.end(), out.begin());
    return out;
  }
  BitString bits() {
    const auto count = static_cast<std::size_t>(le(2));
    const ByteView raw = take((count + 7) / 8);
    BitString out = BitString::from_bytes(raw, count);
    if (!std::equal(raw.begin(), raw.end(), out.bytes().begin())) {
      throw DecodeError("non-zero padding bits in bit string");
    }
    return out;
  }
  void finish() const {
    if (pos_ != data_.size()) throw DecodeError("trailing bytes in message body");
  }

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

void put_bytes(Bytes& out, ByteView b) { out.insert(out.end(), b.begin(), b.end()); }

void put_bits(Bytes& out, const BitString& b) {
  if (b.size() > 0xffff) throw ContractError("bit string too long for the wire");
  put_le(out, b.size(), 2);
  put_bytes(out, b.bytes());
}

std::uint8_t profile_flags(ProfileId p) { return static_cast<std::uint8_t>(p); }

Bytes frame(MessageKind kind, ProfileId profile, const Bytes& body) {
  if (body.size() > 0xffffffffu) throw ContractError("message body too large");
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(kind));
  out.push_back(profile_flags(profile));
  put_le(out, body.size(), 4);
  put_bytes(out, body);
  const Bytes sum = compute_checksum(crypto::profile(profile), out);
  put_bytes(out, sum);
  return out;
}

// Validates header and checksum; returns the body.
ByteView unframe(ByteView f, MessageKind kind, ProfileId expected) {
  if (f.size() < kHeaderSize) throw DecodeError("frame shorter than its header");
  if (!std::equal(kMagic.begin(), kMagic.end(), f.begin())) throw DecodeError("bad frame magic");
  if (f[4] != kVersion) throw DecodeError("unsupported frame version");
  if (f[5] != static_cast<std::uint8_t>(kind)) throw DecodeError("unexpected message kind");
  const std::uint8_t flags = f[6];
  if ((flags & 0xfc) != 0) throw DecodeError("reserved frame flag bits set");
  if ((flags & 0x03) > 2) throw DecodeError("invalid profile id in frame");
  const auto profile = static_cast<ProfileId>(flags & 0x03);
  const CryptoProfile& p = crypto::profile(profile);
  const std::uint64_t body_len = get_le(f.subspan(7, 4), 4);
  if (f.size() != kHeaderSize + body_len + p.digest_bytes()) {
    throw DecodeError("frame length does not match its header");
  }
  const std::size_t covered = kHeaderSize + static_cast<std::size_t>(body_len);
  if (!verify_checksum(p, f.first(covered), f.subspan(covered))) {
    throw DecodeError("frame checksum mismatch");
  }
  if (profile != expected) throw NegotiationError("frame profile differs from the session's");
  return f.subspan(kHeaderSize, static_cast<std::size_t>(body_len));
}

void put_request_fields(Bytes& b, const UpdateRequest& m) {
  m.set.validate();
  const CryptoProfile& p = crypto::profile(m.profile);
  if (m.encrypted_timestamp.size() != 16 + p.tag_bytes) {
    throw ContractError("encrypted timestamp has the wrong length for the profile");
  }
  put_le(b, m.set.s0, 8);
  put_le(b, m.set.n, 4);
  put_bytes(b, m.device_id);
  put_le(b, m.device.vendor_id, 2);
  put_le(b, m.device.device_type, 2);
  put_le(b, m.device.hw_revision, 1);
  put_bytes(b, m.nonce);
  put_bytes(b, m.encrypted_timestamp);
  put_bits(b, m.o1);
}

UpdateRequest read_request_fields(Reader& r, ProfileId profile) {
  UpdateRequest m;
  m.profile = profile;
  m.set.s0 = r.le(8);
  const std::uint64_t n = r.le(4);
  if (n > SetDescriptor::kMaxCount) throw DecodeError("reserved bits set in set count");
  m.set.n = n;
  try {
    m.set.validate();
  } catch (const ContractError& e) {
    throw DecodeError(e.what());
  }
  m.device_id = r.array<16>();
  m.device.vendor_id = static_cast<std::uint16_t>(r.le(2));
  m.device.device_type = static_cast<std::uint16_t>(r.le(2));
  m.device.hw_revision = static_cast<std::uint8_t>(r.le(1));
  m.nonce = r.array<12>();
  const ByteView ts = r.take(16 + crypto::profile(profile).tag_bytes);
  m.encrypted_timestamp.assign(ts.begin(), ts.end());
  m.o1 = r.bits();
  return m;
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::relay_request: return "relay_request";
    case MessageKind::update_request: return "update_request";
    case MessageKind::model_query: return "model_query";
    case MessageKind::model_response: return "model_response";
    case MessageKind::firmware_package: return "firmware_package";
  }
  return "?";
}

Bytes encode_fv(const FirmwareVersion& fv) {
  Bytes b;
  put_le(b, fv.vendor_id, 2);
  put_le(b, fv.device_type, 2);
  put_le(b, fv.hw_revision, 1);
  put_le(b, fv.sw_revision, 4);
  put_le(b, fv.best_before, 8);
  put_le(b, fv.release_ts, 8);
  return b;
}

FirmwareVersion decode_fv(ByteView bytes) {
  if (bytes.size() != FirmwareVersion::kEncodedSize) throw DecodeError("FV must be 25 bytes");
  Reader r(bytes);
  FirmwareVersion fv;
  fv.vendor_id = static_cast<std::uint16_t>(r.le(2));
  fv.device_type = static_cast<std::uint16_t>(r.le(2));
  fv.hw_revision = static_cast<std::uint8_t>(r.le(1));
  fv.sw_revision = static_cast<std::uint32_t>(r.le(4));
  fv.best_before = r.le(8);
  fv.release_ts = r.le(8);
  return fv;
}

Bytes encode(const UpdateRequest& m) {
  Bytes b;
  put_request_fields(b, m);
  return frame(MessageKind::update_request, m.profile, b);
}

Bytes encode(const RelayRequest& m) {
  Bytes b;
  put_bytes(b, m.fds_id);
  put_bits(b, m.challenge);
  put_request_fields(b, m.request);
  return frame(MessageKind::relay_request, m.request.profile, b);
}

Bytes encode(const ModelQuery& m) {
  Bytes b;
  put_bytes(b, m.target);
  put_bits(b, m.challenge);
  return frame(MessageKind::model_query, m.profile, b);
}

Bytes encode(const ModelResponse& m) {
  Bytes b;
  put_bytes(b, m.target);
  put_bits(b, m.response);
  return frame(MessageKind::model_response, m.profile, b);
}

Bytes encode(const FirmwarePackage& m) {
  if (m.payload.size() > 0xffffffffu - 1024) throw ContractError("payload too large");
  Bytes b;
  put_bytes(b, m.nonce_outer);
  put_bytes(b, m.nonce_inner);
  put_bits(b, m.o2);
  put_le(b, m.payload.size(), 4);
  put_bytes(b, m.payload);
  return frame(MessageKind::firmware_package, m.profile, b);
}

UpdateRequest decode_update_request(ByteView f, ProfileId expected) {
  Reader r(unframe(f, MessageKind::update_request, expected));
  UpdateRequest m = read_request_fields(r, expected);
  r.finish();
  return m;
}

RelayRequest decode_relay_request(ByteView f, ProfileId expected) {
  Reader r(unframe(f, MessageKind::relay_request, expected));
  RelayRequest m;
  m.fds_id = r.array<16>();
  m.challenge = r.bits();
  m.request = read_request_fields(r, expected);
  r.finish();
  return m;
}

ModelQuery decode_model_query(ByteView f, ProfileId expected) {
  Reader r(unframe(f, MessageKind::model_query, expected));
  ModelQuery m;
  m.profile = expected;
  m.target = r.array<16>();
  m.challenge = r.bits();
  r.finish();
  return m;
}

ModelResponse decode_model_response(ByteView f, ProfileId expected) {
  Reader r(unframe(f, MessageKind::model_response, expected));
  ModelResponse m;
  m.profile = expected;
  m.target = r.array<16>();
  m.response = r.bits();
  r.finish();
  return m;
}

FirmwarePackage decode_firmware_package(ByteView f, ProfileId expected) {
  Reader r(unframe(f, MessageKind::firmware_package, expected));
  FirmwarePackage m;
  m.profile = expected;
  m.nonce_outer = r.array<12>();
  m.nonce_inner = r.array<12>();
  m.o2 = r.bits();
  const auto len = static_cast<std::size_t>(r.le(4));
  const ByteView payload = r.take(len);
  m.payload.assign(payload.begin(), payload.end());
  r.finish();
  return m;
}

MessageKind peek_kind(ByteView f) {
  if (f.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), f.begin())) {
    throw DecodeError("not a protocol frame");
  }
  if (f[5] < 1 || f[5] > 5) throw DecodeError("unknown message kind");
  return static_cast<MessageKind>(f[5]);
}

Bytes compute_checksum(const CryptoProfile& profile, ByteView data) {
  return crypto::hash(profile, data);
}

bool verify_checksum(const CryptoProfile& profile, ByteView data, ByteView checksum) {
  const Bytes expect = compute_checksum(profile, data);
  if (checksum.size() != expect.size()) return false;
  return CRYPTO_memcmp(expect.data(), checksum.data(), expect.size()) == 0;
}

std::size_t firmware_package_overhead(const CryptoProfile& profile, std::size_t response_bits) {
  return kHeaderSize + 12 + 12 + 2 + (response_bits + 7) / 8 + 4 + profile.digest_bytes();
}

Bytes encode_inner(const CryptoProfile& profile, ByteView fi, const FirmwareVersion& fv) {
  Bytes out;
  out.reserve(8 + fi.size() + FirmwareVersion::kEncodedSize + profile.digest_bytes());
  put_le(out, fi.size(), 8);
  put_bytes(out, fi);
  put_bytes(out, encode_fv(fv));
  const Bytes d = crypto::hash(profile, out);
  put_bytes(out, d);
  return out;
}

InnerPayload decode_inner(const CryptoProfile& profile, ByteView plaintext) {
  const std::size_t dlen = profile.digest_bytes();
  if (plaintext.size() < 8 + FirmwareVersion::kEncodedSize + dlen) {
    throw DecodeError("inner payload too short");
  }
  const std::uint64_t fi_len = get_le(plaintext, 8);
  if (fi_len != plaintext.size() - 8 - FirmwareVersion::kEncodedSize - dlen) {
    throw DecodeError("inner payload length field inconsistent");
  }
  const std::size_t body = plaintext.size() - dlen;
  if (!verify_checksum(profile, plaintext.first(body), plaintext.subspan(body))) {
    throw DecodeError("inner payload digest mismatch");
  }
  InnerPayload out;
  const auto n = static_cast<std::size_t>(fi_len);
  out.fi.assign(plaintext.begin() + 8, plaintext.begin() + 8 + static_cast<std::ptrdiff_t>(n));
  out.fv = decode_fv(plaintext.subspan(8 + n, FirmwareVersion::kEncodedSize));
  return out;
}

Bytes timestamp_block(std::uint64_t timestamp) {
  Bytes b;
  put_le(b, timestamp, 8);
  b.resize(16, 0);
  return b;
}

std::uint64_t parse_timestamp_block(ByteView block) {
  if (block.size() != 16) throw DecodeError("timestamp block must be 16 bytes");
  if (std::any_of(block.begin() + 8, block.end(), [](std::uint8_t v) { return v != 0; })) {
    throw DecodeError("timestamp block padding is not zero");
  }
  return get_le(block, 8);
}

}  // namespace pufota::wire
