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

#pragma once

#include <array>
#include <cstdint>

#include "pufota/bits.hpp"
#include "pufota/crypto/profile.hpp"
#include "pufota/types.hpp"

namespace pufota::wire {

// Frame layout (all integers little-endian):
//
//   magic "PUFW" | version u8 | kind u8 | flags u8 | body_len u32 | body |
//   checksum = hash(every preceding byte)
//
// flags bits 0-1 carry the profile id; bits 2-7 are reserved and must be
// zero. Every frame kind is checksummed.
inline constexpr std::array<std::uint8_t, 4> kMagic = {'P', 'U', 'F', 'W'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 11;

enum class MessageKind : std::uint8_t {
  relay_request = 1,     // ED -> PPMR
  update_request = 2,    // PPMR -> FDS
  model_query = 3,       // FDS -> PPMR
  model_response = 4,    // PPMR -> FDS
  firmware_package = 5,  // FDS -> ED
};

std::string_view to_string(MessageKind kind);

// Identifies which firmware line a device runs.
struct DeviceKey {
  std::uint16_t vendor_id = 0;
  std::uint16_t device_type = 0;
  std::uint8_t hw_revision = 0;

  auto operator<=>(const DeviceKey&) const = default;
};

// FV, 25 bytes on the wire: vendor u16 | device u16 | hw u8 | sw u32 |
// best_before u64 | release_ts u64.
struct FirmwareVersion {
  std::uint16_t vendor_id = 0;
  std::uint16_t device_type = 0;
  std::uint8_t hw_revision = 0;
  std::uint32_t sw_revision = 0;
  std::uint64_t best_before = 0;
  std::uint64_t release_ts = 0;

  static constexpr std::size_t kEncodedSize = 25;

  DeviceKey key() const { return {vendor_id, device_type, hw_revision}; }
  bool operator==(const FirmwareVersion&) const = default;
};

Bytes encode_fv(const FirmwareVersion& fv);
FirmwareVersion decode_fv(ByteView bytes);

struct UpdateRequest {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  SetDescriptor set;
  InstanceId device_id{};  // the requesting ED's PPUF, for the O2 model query
  DeviceKey device;        // selects the firmware line at the FDS
  crypto::Nonce nonce{};
  Bytes encrypted_timestamp;  // 16 bytes, plus the AEAD tag under AES-GCM
  BitString o1;

  bool operator==(const UpdateRequest&) const = default;
};

// Step (1): the ED sends H(I1) to the PPMR, addressed to an FDS model; the
// PPMR answers the challenge and forwards the rest as an UpdateRequest.
struct RelayRequest {
  InstanceId fds_id{};
  BitString challenge;
  UpdateRequest request;  // o1 empty

  bool operator==(const RelayRequest&) const = default;
};

struct ModelQuery {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  InstanceId target{};
  BitString challenge;

  bool operator==(const ModelQuery&) const = default;
};

struct ModelResponse {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  InstanceId target{};
  BitString response;

  bool operator==(const ModelResponse&) const = default;
};

struct FirmwarePackage {
  crypto::ProfileId profile = crypto::ProfileId::lightweight;
  crypto::Nonce nonce_outer{};
  crypto::Nonce nonce_inner{};
  BitString o2;
  Bytes payload;  // ((FI || FV)_SK)_I2

  bool operator==(const FirmwarePackage&) const = default;
};

Bytes encode(const UpdateRequest& m);
Bytes encode(const RelayRequest& m);
Bytes encode(const ModelQuery& m);
Bytes encode(const ModelResponse& m);
Bytes encode(const FirmwarePackage& m);

// Decoders verify the checksum before looking at the body. They throw
// DecodeError on any framing, length, reserved-bit or checksum violation,
// and NegotiationError when the frame's profile differs from `expected`.
UpdateRequest decode_update_request(ByteView frame, crypto::ProfileId expected);
RelayRequest decode_relay_request(ByteView frame, crypto::ProfileId expected);
ModelQuery decode_model_query(ByteView frame, crypto::ProfileId expected);
ModelResponse decode_model_response(ByteView frame, crypto::ProfileId expected);
FirmwarePackage decode_firmware_package(ByteView frame, crypto::ProfileId expected);

// Reads the header only (no checksum check); used for routing.
MessageKind peek_kind(ByteView frame);

Bytes compute_checksum(const crypto::CryptoProfile& profile, ByteView data);
// Hashes all of `data`, then compares in constant time.
bool verify_checksum(const crypto::CryptoProfile& profile, ByteView data, ByteView checksum);

// Bytes of a frame that are not payload (header, fixed fields, checksum).
std::size_t firmware_package_overhead(const crypto::CryptoProfile& profile,
                                      std::size_t response_bits);

// Plaintext of the inner layer:
//   fi_len u64 | FI | FV | hash(fi_len | FI | FV)
// The trailing digest is what lets the device tell a wrong session key from
// a right one under the counter-mode ciphers.
Bytes encode_inner(const crypto::CryptoProfile& profile, ByteView fi, const FirmwareVersion& fv);

struct InnerPayload {
  Bytes fi;
  FirmwareVersion fv;
};
// Throws DecodeError when the lengths or the digest do not check out.
InnerPayload decode_inner(const crypto::CryptoProfile& profile, ByteView plaintext);

// The 16-byte block encrypted under kdf(I1): le64(timestamp) | 8 zero bytes.
Bytes timestamp_block(std::uint64_t timestamp);
// Throws DecodeError when the padding is not zero.
std::uint64_t parse_timestamp_block(ByteView block);

}  // namespace pufota::wire
