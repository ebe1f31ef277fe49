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

#include <cctype>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pufota/attacks.hpp"
#include "pufota/error.hpp"

namespace pufota::attacks {
namespace {

BigInt pow10(unsigned k) {
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) r *= 10;
  return r;
}

// floor(log10(v)) for v > 0.
int decimal_exponent(const BigRational& v) {
  const BigInt num = numerator(v), den = denominator(v);
  int e = static_cast<int>(num.str().size()) - static_cast<int>(den.str().size());
  auto at_least = [&](int k) {  // v >= 10^k
    return k >= 0 ? num >= den * pow10(static_cast<unsigned>(k))
                  : num * pow10(static_cast<unsigned>(-k)) >= den;
  };
  while (!at_least(e)) --e;
  while (at_least(e + 1)) ++e;
  return e;
}

std::uint64_t prefix_key(const BitString& b) {
  const auto bytes = b.bytes();
  return get_le(bytes, std::min<std::size_t>(8, bytes.size()));
}

// Man in the middle with the hash-table shortcut: it hashes the announced
// set once, looks up the cleartext H(I1) and H(I2), and rebuilds the package
// around its own firmware. Requests pass through untouched while it works;
// only the package is held back for the re-encryption.
class MitmAdversary : public sim::Adversary {
 public:
  MitmAdversary(sim::Simulation& s, sim::FirmwareImage image)
      : Adversary(s.costs()),
        s_(s),
        p_(crypto::profile(s.config().profile)),
        image_(std::move(image)),
        rng_(mix_seed(s.config().seed, 0x3171)) {}

  void observe(const sim::Message& m) override {
    const auto kind = wire::peek_kind(m.bytes);
    const VirtualTime before = meter().total();
    if (kind == wire::MessageKind::relay_request) {
      const auto relay = wire::decode_relay_request(m.bytes, p_.id);
      width_ = relay.challenge.size();
      for (std::uint64_t k = 0; k < relay.request.set.n; ++k) {
        const std::uint64_t x = relay.request.set.s0 + k;
        table_.emplace(prefix_key(dppuf::challenge_for_element(p_, x, width_)), x);
      }
      meter().charge(WorkKind::hash, relay.request.set.n);
      i1_ = lookup(relay.challenge);
      if (i1_) {
        const auto k1 = crypto::kdf_from_element(p_, *i1_);
        const auto block = crypto::decrypt(p_, k1, relay.request.encrypted_timestamp,
                                           relay.request.nonce);
        meter().charge(WorkKind::timestamp_cipher, 1, 16);
        sk_ = crypto::derive_session_key(k1, wire::parse_timestamp_block(block));
      }
    } else if (kind == wire::MessageKind::model_query) {
      i2_ = lookup(wire::decode_model_query(m.bytes, p_.id).challenge);
    }
    busy_until_ = std::max(busy_until_, s_.clock().now()) + (meter().total() - before);
  }

  void modify(sim::Message& m) override {
    if (wire::peek_kind(m.bytes) != wire::MessageKind::firmware_package || !sk_ || !i2_) return;
    const VirtualTime before = meter().total();
    auto fp = wire::decode_firmware_package(m.bytes, p_.id);
    const auto k2 = crypto::kdf_from_element(p_, *i2_);
    const Bytes middle = crypto::decrypt(p_, k2, fp.payload, fp.nonce_outer);
    meter().charge(WorkKind::payload_cipher, 1, fp.payload.size());
    const Bytes plain = crypto::decrypt(p_, *sk_, middle, fp.nonce_inner);
    meter().charge(WorkKind::payload_cipher, 1, middle.size());
    const auto genuine = wire::decode_inner(p_, plain);
    keys_recovered_ = true;

    const Bytes forged = wire::encode_inner(p_, image_.fi, genuine.fv);
    meter().charge(WorkKind::checksum, 1, forged.size());
    const Bytes forged_middle = crypto::encrypt(p_, *sk_, forged, fp.nonce_inner);
    meter().charge(WorkKind::payload_cipher, 1, forged.size());
    fp.payload = crypto::encrypt(p_, k2, forged_middle, fp.nonce_outer);
    meter().charge(WorkKind::payload_cipher, 1, forged_middle.size());
    m.bytes = wire::encode(fp);
    meter().charge(WorkKind::checksum, 1, m.bytes.size());
    busy_until_ = std::max(busy_until_, s_.clock().now()) + (meter().total() - before);
    hold_ = busy_until_ - s_.clock().now();
  }

  VirtualTime delay(const sim::Message& m) override {
    if (wire::peek_kind(m.bytes) != wire::MessageKind::firmware_package) return 0;
    return std::exchange(hold_, 0);
  }

  bool keys_recovered() const { return keys_recovered_; }

 private:
  std::optional<std::uint64_t> lookup(const BitString& challenge) {
    meter().charge(WorkKind::hash, 1);
    auto [lo, hi] = table_.equal_range(prefix_key(challenge));
    for (auto it = lo; it != hi; ++it) {
      if (dppuf::challenge_for_element(p_, it->second, width_) == challenge) return it->second;
    }
    return std::nullopt;
  }

  sim::Simulation& s_;
  const crypto::CryptoProfile& p_;
  sim::FirmwareImage image_;
  Rng rng_;
  std::size_t width_ = 0;
  std::unordered_multimap<std::uint64_t, std::uint64_t> table_;
  std::optional<std::uint64_t> i1_, i2_;
  std::optional<crypto::Key128> sk_;
  VirtualTime busy_until_ = 0;
  VirtualTime hold_ = 0;
  bool keys_recovered_ = false;
};

}  // namespace

BigRational parse_probability(std::string_view text) {
  std::size_t i = 0;
  BigInt digits = 0;
  int scale = 0;
  bool any = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, any = true) {
    digits = digits * 10 + (text[i] - '0');
  }
  if (i < text.size() && text[i] == '.') {
    for (++i; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      digits = digits * 10 + (text[i] - '0');
      --scale;
      any = true;
    }
  }
  if (any && i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    int exp = 0;
    bool exp_digits = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exp = exp * 10 + (text[i] - '0');
      exp_digits = true;
      if (exp > 100000) throw ContractError("probability exponent out of range");
    }
    if (!exp_digits) any = false;
    scale += negative ? -exp : exp;
  }
  if (!any || i != text.size()) {
    throw ContractError("probability must be a decimal number, got '" + std::string(text) + "'");
  }
  BigRational c = scale >= 0 ? BigRational(digits * pow10(static_cast<unsigned>(scale)))
                             : BigRational(digits, pow10(static_cast<unsigned>(-scale)));
  if (c > 1) throw ContractError("probability must lie in [0, 1]");
  return c;
}

BigInt dictionary_size_for_probability(const BigRational& c, unsigned bits) {
  if (c < 0 || c > 1) throw ContractError("probability must lie in [0, 1]");
  const BigInt scaled = numerator(c) << bits;
  const BigInt den = denominator(c);
  BigInt q = scaled / den;
  if (q * den != scaled) ++q;
  return q;
}

BigRational dictionary_probability(const BigInt& x, unsigned bits) {
  const BigInt space = BigInt(1) << bits;
  if (x < 0 || x > space) throw ContractError("dictionary cannot exceed the challenge space");
  return BigRational(x, space);
}

DictionarySizing size_dictionary(const BigRational& c, unsigned bits) {
  DictionarySizing d;
  d.probability = c;
  d.entries = dictionary_size_for_probability(c, bits);
  d.storage_bits = 2 * d.entries;
  d.pair_storage_bits = d.entries * 2 * bits;
  return d;
}

std::string to_scientific(const BigRational& value, unsigned digits) {
  if (digits == 0) throw ContractError("at least one significant digit");
  if (value == 0) return "0";
  const bool negative = value < 0;
  const BigRational v = negative ? BigRational(-value) : value;
  int e = decimal_exponent(v);
  // mantissa = round_half_up(v * 10^(digits - 1 - e))
  const int shift = static_cast<int>(digits) - 1 - e;
  BigInt num = numerator(v), den = denominator(v);
  if (shift >= 0) {
    num *= pow10(static_cast<unsigned>(shift));
  } else {
    den *= pow10(static_cast<unsigned>(-shift));
  }
  BigInt m = (2 * num + den) / (2 * den);
  if (m == pow10(digits)) {
    m /= 10;
    ++e;
  }
  std::string s = m.str();
  std::string out = negative ? "-" : "";
  out += s.substr(0, 1);
  if (s.size() > 1) out += "." + s.substr(1);
  return out + "e" + std::to_string(e);
}

std::string to_scientific(const BigInt& value, unsigned digits) {
  return to_scientific(BigRational(value), digits);
}

BigRational bits_to_petabytes(const BigInt& bits) {
  return BigRational(bits, 8 * pow10(15));
}

RaceAnalysis mitm_race_analysis(const RaceCosts& c) {
  if (c.t_hash <= 0 || c.t_dec1 <= 0 || c.t_dec2 <= 0 || c.n == 0) {
    throw ContractError("race costs must be positive and n >= 1");
  }
  const auto n = static_cast<VirtualTime>(c.n);
  RaceAnalysis r;
  r.attacker_time = (n + 2) * c.t_hash + c.t_dec1 + 4 * c.t_dec2;
  r.server_time = (n + 1) * c.t_hash + c.t_dec1 + 2 * c.t_dec2;
  r.server_advantage = c.t_hash + 2 * c.t_dec2 > c.t_dec2;
  return r;
}

std::string MitmRun::to_json() const {
  nlohmann::ordered_json j;
  j["record"] = "mitm";
  j["t_hash"] = costs.t_hash;
  j["t_dec1"] = costs.t_dec1;
  j["t_dec2"] = costs.t_dec2;
  j["n"] = costs.n;
  j["attacker_closed_form"] = closed_form.attacker_time;
  j["server_closed_form"] = closed_form.server_time;
  j["attacker_meter"] = attacker_meter;
  j["server_meter"] = server_meter;
  j["meters_match"] = meters_match;
  j["server_advantage"] = closed_form.server_advantage;
  j["keys_recovered"] = keys_recovered;
  j["substituted_firmware_installed"] = substituted_firmware_installed;
  j["device_verdict"] = device_cause ? std::string(sim::to_string(*device_cause)) : "accept";
  return j.dump();
}

MitmRun run_mitm_simulation(const sim::ScenarioConfig& config) {
  sim::ScenarioConfig cfg = config;
  cfg.cost_preset = sim::CostPreset::symbolic;
  sim::Simulation s(cfg);
  sim::FirmwareImage image = s.release();
  image.fi = sim::synthetic_firmware(image.fi.size(), mix_seed(cfg.seed, 0xbad));
  MitmAdversary adv(s, image);
  s.channel().set_adversary(&adv);
  const auto o = s.run_update();

  MitmRun r;
  r.costs.t_hash = s.costs().cost(WorkKind::hash);
  r.costs.t_dec1 = s.costs().cost(WorkKind::timestamp_cipher, 16);
  r.costs.t_dec2 = s.costs().cost(WorkKind::payload_cipher);
  r.costs.n = cfg.ed.set_size;
  r.closed_form = mitm_race_analysis(r.costs);
  r.attacker_meter = adv.meter().race_total();
  r.server_meter = s.fds().meter().race_total();
  r.meters_match = r.attacker_meter == r.closed_form.attacker_time &&
                   r.server_meter == r.closed_form.server_time;
  r.keys_recovered = adv.keys_recovered();
  r.substituted_firmware_installed = o.accepted && s.device().firmware() == image.fi;
  r.device_cause = o.cause;
  return r;
}

}  // namespace pufota::attacks
