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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "pufota/crypto/hash.hpp"
#include "pufota/dppuf.hpp"
#include "pufota/error.hpp"
#include "pufota/rng.hpp"
#include "pufota/sim/scenario.hpp"
#include "pufota/wire.hpp"
#include "support/golden.hpp"

namespace pufota::wire {
namespace {

using crypto::ProfileId;

std::map<std::string, std::string> read_golden(const std::string& name) {
  return testing::read_golden(PUFOTA_TESTDATA_DIR, name);
}

void write_golden(const std::string& name, const std::string& comment,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
  std::ofstream out(std::string(PUFOTA_TESTDATA_DIR) + "/" + name);
  out << comment;
  for (const auto& [k, v] : fields) {
    for (std::size_t i = 0; i < v.size(); i += 64) out << k << " = " << v.substr(i, 64) << '\n';
  }
}

bool regenerate() { return std::getenv("PUFOTA_REGEN_GOLDEN") != nullptr; }

std::string profile_tag(ProfileId p) { return std::string(crypto::profile(p).name); }

using testing::golden_request;
using testing::request_file;

TEST(WireGolden, UpdateRequest) {
  for (auto id : crypto::kAllProfiles) {
    const Bytes frame = encode(golden_request(id));
    if (regenerate()) {
      write_golden(request_file(id),
                   "# UpdateRequest frame, " + profile_tag(id) + " profile.\n"
                   "# Generated once by the reference encoder (PUFOTA_REGEN_GOLDEN=1\n"
                   "# wire_test) from a width-256 dPPUF built with seed 1: set\n"
                   "# s0 = 0x123456789abc, n = 1000000, element s0 + 4321, timestamp\n"
                   "# 1767225600, nonce a0..ab, device 5a17/0102/03. Frozen.\n",
                   {{"frame", to_hex(frame)}});
    }
    const auto golden = read_golden(request_file(id));
    ASSERT_TRUE(golden.count("frame")) << request_file(id);
    EXPECT_EQ(to_hex(frame), golden.at("frame")) << profile_tag(id);
    EXPECT_EQ(decode_update_request(from_hex(golden.at("frame")), id), golden_request(id));
  }
}

// Built byte by byte from the layout description, not through the encoder.
TEST(WireOracle, HandAssembledUpdateRequest) {
  const UpdateRequest m = golden_request(ProfileId::lightweight);
  Bytes body;
  const std::uint8_t s0[] = {0xbc, 0x9a, 0x78, 0x56, 0x34, 0x12, 0x00, 0x00};
  body.insert(body.end(), std::begin(s0), std::end(s0));
  const std::uint8_t n[] = {0x40, 0x42, 0x0f, 0x00};  // 1000000
  body.insert(body.end(), std::begin(n), std::end(n));
  body.insert(body.end(), m.device_id.begin(), m.device_id.end());
  const std::uint8_t dev[] = {0x17, 0x5a, 0x02, 0x01, 0x03};
  body.insert(body.end(), std::begin(dev), std::end(dev));
  for (int i = 0; i < 12; ++i) body.push_back(static_cast<std::uint8_t>(0xa0 + i));
  body.insert(body.end(), m.encrypted_timestamp.begin(), m.encrypted_timestamp.end());
  body.push_back(0x00);  // 256 bits
  body.push_back(0x01);
  body.insert(body.end(), m.o1.bytes().begin(), m.o1.bytes().end());

  Bytes frame = {'P', 'U', 'F', 'W', 0x01, 0x02, 0x00};
  frame.push_back(static_cast<std::uint8_t>(body.size()));
  frame.push_back(static_cast<std::uint8_t>(body.size() >> 8));
  frame.push_back(0);
  frame.push_back(0);
  frame.insert(frame.end(), body.begin(), body.end());
  const Bytes sum = crypto::digest(crypto::HashAlgorithm::sha256, frame);
  frame.insert(frame.end(), sum.begin(), sum.end());

  EXPECT_EQ(body.size(), 8u + 4 + 16 + 5 + 12 + 16 + 2 + 32);
  EXPECT_EQ(to_hex(encode(m)), to_hex(frame));

  // The encrypted timestamp is the SIMON counter-mode image of the block.
  const auto& p = crypto::profile(ProfileId::lightweight);
  const Bytes ts = crypto::decrypt(p, crypto::kdf_from_element(p, 0x123456789abcull + 4321),
                                   m.encrypted_timestamp, m.nonce);
  EXPECT_EQ(parse_timestamp_block(ts), 1'767'225'600u);
}

TEST(WireGolden, SingleBitFlipSweep) {
  for (auto id : crypto::kAllProfiles) {
    const auto golden = read_golden(request_file(id));
    ASSERT_TRUE(golden.count("frame"));
    const Bytes frame = from_hex(golden.at("frame"));
    std::size_t rejected = 0;
    for (std::size_t bit = 0; bit < frame.size() * 8; ++bit) {
      Bytes bad = frame;
      bad[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
      try {
        decode_update_request(bad, id);
        ADD_FAILURE() << profile_tag(id) << " accepted flip of bit " << bit;
      } catch (const DecodeError&) {
        ++rejected;
      }
    }
    EXPECT_EQ(rejected, frame.size() * 8);
  }
}

// Package around a 233000-byte synthetic payload. The file stores the frame's
// header and fixed fields, its length and its SHA-256 rather than 466 kB of hex.
TEST(WireGolden, FirmwarePackage) {
  const ProfileId id = ProfileId::lightweight;
  dppuf::DppufConfig cfg;
  cfg.seed = 1;
  const auto puf = dppuf::DppufInstance::build(cfg);
  FirmwarePackage fp;
  fp.profile = id;
  for (std::size_t i = 0; i < 12; ++i) {
    fp.nonce_outer[i] = static_cast<std::uint8_t>(i);
    fp.nonce_inner[i] = static_cast<std::uint8_t>(0x10 + i);
  }
  fp.o2 = puf.evaluate(dppuf::challenge_for_element(crypto::profile(id), 99, 256));
  fp.payload = sim::synthetic_firmware(233'000, 1);
  const Bytes frame = encode(fp);
  const std::size_t prefix = kHeaderSize + 12 + 12 + 2 + 32 + 4;
  const std::string digest =
      to_hex(crypto::digest(crypto::HashAlgorithm::sha256, frame));
  if (regenerate()) {
    write_golden("firmware_package_light_233000.hex",
                 "# FirmwarePackage frame, light profile, 233000-byte payload from\n"
                 "# synthetic_firmware(233000, seed 1); o2 = seed-1 dPPUF response to\n"
                 "# element 99; nonces 00..0b and 10..1b. Generated once by the\n"
                 "# reference encoder (PUFOTA_REGEN_GOLDEN=1 wire_test). Frozen.\n",
                 {{"length", std::to_string(frame.size())},
                  {"prefix", to_hex(ByteView(frame).first(prefix))},
                  {"sha256", digest}});
  }
  const auto golden = read_golden("firmware_package_light_233000.hex");
  ASSERT_TRUE(golden.count("sha256"));
  EXPECT_EQ(std::to_string(frame.size()), golden.at("length"));
  EXPECT_EQ(to_hex(ByteView(frame).first(prefix)), golden.at("prefix"));
  EXPECT_EQ(digest, golden.at("sha256"));
  EXPECT_EQ(frame.size(), fp.payload.size() + firmware_package_overhead(crypto::profile(id), 256));
  EXPECT_EQ(decode_firmware_package(frame, id), fp);
}

UpdateRequest random_request(Rng& rng, ProfileId id) {
  UpdateRequest m;
  m.profile = id;
  m.set = {rng(), 1 + uniform_below(rng, SetDescriptor::kMaxCount)};
  if (m.set.s0 > ~std::uint64_t{0} - m.set.n) m.set.s0 = 0;
  for (auto& b : m.device_id) b = static_cast<std::uint8_t>(rng());
  m.device = {static_cast<std::uint16_t>(rng()), static_cast<std::uint16_t>(rng()),
              static_cast<std::uint8_t>(rng())};
  for (auto& b : m.nonce) b = static_cast<std::uint8_t>(rng());
  m.encrypted_timestamp = random_bytes(rng, 16 + crypto::profile(id).tag_bytes);
  const std::size_t bits = uniform_below(rng, 600);
  m.o1 = BitString::from_bytes(random_bytes(rng, (bits + 7) / 8), bits);
  return m;
}

TEST(WireProperty, Canonicality) {
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    const ProfileId id = crypto::kAllProfiles[i % 3];
    const UpdateRequest m = random_request(rng, id);
    const Bytes b = encode(m);
    const UpdateRequest back = decode_update_request(b, id);
    ASSERT_EQ(back, m);
    ASSERT_EQ(encode(back), b);

    RelayRequest rr;
    rr.request = m;
    rr.request.o1 = BitString();
    for (auto& x : rr.fds_id) x = static_cast<std::uint8_t>(rng());
    rr.challenge = BitString::from_bytes(random_bytes(rng, 32), 256);
    const Bytes rb = encode(rr);
    ASSERT_EQ(decode_relay_request(rb, id), rr);
    ASSERT_EQ(encode(decode_relay_request(rb, id)), rb);

    ModelQuery q{id, rr.fds_id, rr.challenge};
    ASSERT_EQ(decode_model_query(encode(q), id), q);
    ModelResponse r{id, rr.fds_id, m.o1};
    ASSERT_EQ(decode_model_response(encode(r), id), r);

    FirmwarePackage fp;
    fp.profile = id;
    fp.nonce_outer = m.nonce;
    fp.o2 = m.o1;
    fp.payload = random_bytes(rng, uniform_below(rng, 3000));
    const Bytes fb = encode(fp);
    ASSERT_EQ(decode_firmware_package(fb, id), fp);
    ASSERT_EQ(encode(decode_firmware_package(fb, id)), fb);
  }
}

// Re-seal a mutated frame body with a valid checksum.
Bytes reseal(Bytes frame, ProfileId id) {
  const auto& p = crypto::profile(id);
  frame.resize(frame.size() - p.digest_bytes());
  const std::uint64_t body = frame.size() - kHeaderSize;
  for (int i = 0; i < 4; ++i) frame[7 + i] = static_cast<std::uint8_t>(body >> (8 * i));
  const Bytes sum = compute_checksum(p, frame);
  frame.insert(frame.end(), sum.begin(), sum.end());
  return frame;
}

TEST(WireProperty, NonCanonicalFormsRejected) {
  const ProfileId id = ProfileId::lightweight;
  UpdateRequest m = golden_request(id);
  m.o1 = BitString::from_hex("ff", 5);  // 5 bits: 3 padding bits
  Bytes frame = encode(m);
  ASSERT_EQ(decode_update_request(frame, id), m);

  const std::size_t digest = crypto::profile(id).digest_bytes();
  Bytes padded = frame;
  padded[padded.size() - digest - 1] |= 0x01;  // a padding bit
  EXPECT_THROW(decode_update_request(reseal(padded, id), id), DecodeError);

  Bytes count = frame;
  count[kHeaderSize + 8 + 2] |= 0x10;  // bit 20 of n
  EXPECT_THROW(decode_update_request(reseal(count, id), id), DecodeError);

  Bytes zero_n = frame;
  for (int i = 0; i < 4; ++i) zero_n[kHeaderSize + 8 + i] = 0;
  EXPECT_THROW(decode_update_request(reseal(zero_n, id), id), DecodeError);

  Bytes trailing = frame;
  trailing.insert(trailing.end() - static_cast<std::ptrdiff_t>(digest), 0x00);
  EXPECT_THROW(decode_update_request(reseal(trailing, id), id), DecodeError);

  Bytes reserved = frame;
  reserved[6] |= 0x04;
  EXPECT_THROW(decode_update_request(reseal(reserved, id), id), DecodeError);

  Bytes truncated(frame.begin(), frame.begin() + 20);
  EXPECT_THROW(decode_update_request(truncated, id), DecodeError);
  EXPECT_THROW(decode_update_request(Bytes{}, id), DecodeError);
  EXPECT_THROW(decode_firmware_package(frame, id), DecodeError);  // wrong kind
}

TEST(Wire, ProfileNegotiation) {
  const Bytes frame = encode(golden_request(ProfileId::midweight));
  EXPECT_THROW(decode_update_request(frame, ProfileId::lightweight), NegotiationError);
  EXPECT_THROW(decode_update_request(frame, ProfileId::heavyweight), NegotiationError);
  // A checksum failure wins over a profile mismatch.
  Bytes bad = frame;
  bad.back() ^= 1;
  try {
    decode_update_request(bad, ProfileId::lightweight);
    FAIL();
  } catch (const NegotiationError&) {
    FAIL() << "profile checked before checksum";
  } catch (const DecodeError&) {
  }
}

TEST(Wire, FirmwarePackageSizesAndTamper) {
  Rng rng(3);
  for (auto id : crypto::kAllProfiles) {
    const auto& p = crypto::profile(id);
    EXPECT_LE(firmware_package_overhead(p, 256), 1024u);
    for (std::size_t size : {0u, 1u, 65535u, 1183u * 1024u}) {
      FirmwarePackage fp;
      fp.profile = id;
      fp.o2 = BitString::from_bytes(random_bytes(rng, 32), 256);
      fp.payload = random_bytes(rng, size);
      const Bytes b = encode(fp);
      EXPECT_EQ(b.size(), size + firmware_package_overhead(p, 256));
      EXPECT_EQ(decode_firmware_package(b, id), fp);
    }
    FirmwarePackage fp;
    fp.profile = id;
    fp.o2 = BitString::from_bytes(random_bytes(rng, 32), 256);
    fp.payload = random_bytes(rng, 100);
    Bytes b = encode(fp);
    b[kHeaderSize + 24 + 2 + 5] ^= 0x20;  // inside o2
    EXPECT_THROW(decode_firmware_package(b, id), DecodeError);
  }
}

TEST(Wire, ChecksumWidthAndVerify) {
  EXPECT_EQ(compute_checksum(crypto::profile(ProfileId::lightweight), as_bytes("x")).size(), 32u);
  EXPECT_EQ(compute_checksum(crypto::profile(ProfileId::midweight), as_bytes("x")).size(), 32u);
  EXPECT_EQ(compute_checksum(crypto::profile(ProfileId::heavyweight), as_bytes("x")).size(), 64u);
  const auto& p = crypto::profile(ProfileId::heavyweight);
  Rng rng(1);
  Bytes data = random_bytes(rng, 500);
  const Bytes sum = compute_checksum(p, data);
  EXPECT_TRUE(verify_checksum(p, data, sum));
  data[250] ^= 4;
  EXPECT_FALSE(verify_checksum(p, data, sum));
  EXPECT_FALSE(verify_checksum(p, data, ByteView(sum).first(10)));
}

TEST(Wire, FirmwareVersionLayout) {
  const FirmwareVersion fv{0x1234, 0xabcd, 0x07, 0x01020304, 0x1122334455667788ull, 42};
  EXPECT_EQ(to_hex(encode_fv(fv)),
            "3412cdab07040302018877665544332211"
            "2a00000000000000");
  EXPECT_EQ(decode_fv(encode_fv(fv)), fv);
  EXPECT_THROW(decode_fv(Bytes(24)), DecodeError);
}

TEST(Wire, InnerPayload) {
  const auto& p = crypto::profile(ProfileId::lightweight);
  const FirmwareVersion fv{1, 2, 3, 4, 5, 6};
  const Bytes fi = {9, 8, 7};
  Bytes inner = encode_inner(p, fi, fv);
  EXPECT_EQ(inner.size(), 8 + 3 + 25 + 32u);
  const auto back = decode_inner(p, inner);
  EXPECT_EQ(back.fi, fi);
  EXPECT_EQ(back.fv, fv);
  Bytes bad = inner;
  bad[9] ^= 1;
  EXPECT_THROW(decode_inner(p, bad), DecodeError);
  bad = inner;
  bad[0] = 4;
  EXPECT_THROW(decode_inner(p, bad), DecodeError);
  EXPECT_THROW(decode_inner(p, ByteView(inner).first(20)), DecodeError);

  EXPECT_EQ(parse_timestamp_block(timestamp_block(77)), 77u);
  Bytes ts = timestamp_block(77);
  ts[12] = 1;
  EXPECT_THROW(parse_timestamp_block(ts), DecodeError);
}

TEST(Wire, PeekKind) {
  EXPECT_EQ(peek_kind(encode(golden_request(ProfileId::lightweight))), MessageKind::update_request);
  Bytes junk(20, 0);
  EXPECT_THROW(peek_kind(junk), DecodeError);
}

}  // namespace
}  // namespace pufota::wire
