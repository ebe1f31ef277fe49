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

#include "pufota/dppuf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "pufota/error.hpp"
#include "pufota/fuzzy_extractor.hpp"
#include "pufota/rng.hpp"

namespace pufota::dppuf {
namespace {

constexpr std::int32_t kNever = std::numeric_limits<std::int32_t>::max();

// Node state of one stage: output value and settle time in each half.
struct Stage {
  std::vector<std::int32_t> val, tl, tr;
  void resize(std::size_t w) {
    val.assign(w, 0);
    tl.assign(w, 0);
    tr.assign(w, 0);
  }
};

struct Scratch {
  Stage a, b;
  std::vector<std::int32_t> bits, pv, ptl, ptr;
  void resize(std::size_t w) {
    if (bits.size() == w) return;
    a.resize(w);
    b.resize(w);
    for (auto* v : {&bits, &pv, &ptl, &ptr}) v->assign(w, 0);
  }
};

// mask is 0 or -1.
inline std::int32_t pick(std::int32_t mask, std::int32_t if_zero, std::int32_t if_set) {
  return (if_set & mask) | (if_zero & ~mask);
}

// Delay rows of one stage, indexed by node.
struct Rows {
  const std::int32_t* l0;
  const std::int32_t* l1;
  const std::int32_t* r0;
  const std::int32_t* r1;
};

#define PUFOTA_KERNEL [[gnu::target_clones("avx512f", "avx2", "default")]]

// Booster gates for nodes [lo, hi): out[j] = XOR(in[j], in[j + delta]).
PUFOTA_KERNEL void booster_range(std::size_t lo, std::size_t hi, std::ptrdiff_t delta,
                                 const std::int32_t* __restrict iv,
                                 const std::int32_t* __restrict itl,
                                 const std::int32_t* __restrict itr, std::int32_t* __restrict ov,
                                 std::int32_t* __restrict otl, std::int32_t* __restrict otr,
                                 const std::int32_t* __restrict l0, const std::int32_t* __restrict l1,
    const std::int32_t* __restrict r0, const std::int32_t* __restrict r1) {
  for (std::size_t j = lo; j < hi; ++j) {
    const std::size_t p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + delta);
    const std::int32_t nv = iv[j] ^ iv[p];
    const std::int32_t m = -nv;
    const std::int32_t ta = itl[j], tb = itl[p], ua = itr[j], ub = itr[p];
    ov[j] = nv;
    otl[j] = std::max(ta, tb) + pick(m, l0[j], l1[j]);
    otr[j] = std::max(ua, ub) + pick(m, r0[j], r1[j]);
  }
}

// Represser gate for node j with partner p. The node computes
// NAND(a ^ c, b ^ c): c = 0 on the lower node of a pair (NAND(a, b)) and
// c = 1 on the upper one (NAND(~a, ~b)). An input equal to c controls.
inline void represser_gate(std::size_t j, std::size_t p, std::int32_t c,
                           const std::int32_t* __restrict iv, const std::int32_t* __restrict itl,
                           const std::int32_t* __restrict itr, std::int32_t* __restrict ov,
                           std::int32_t* __restrict otl, std::int32_t* __restrict otr,
                           const std::int32_t* __restrict l0, const std::int32_t* __restrict l1,
    const std::int32_t* __restrict r0, const std::int32_t* __restrict r1) {
  const std::int32_t a = iv[j];
  const std::int32_t b = iv[p];
  const std::int32_t ta = itl[j], tb = itl[p], ua = itr[j], ub = itr[p];
  const std::int32_t ma = -static_cast<std::int32_t>(a == c);
  const std::int32_t mb = -static_cast<std::int32_t>(b == c);
  const std::int32_t nv = 1 - ((a ^ c) & (b ^ c));
  const std::int32_t mv = -nv;
  const std::int32_t el = std::min(pick(ma, kNever, ta), pick(mb, kNever, tb));
  const std::int32_t er = std::min(pick(ma, kNever, ua), pick(mb, kNever, ub));
  ov[j] = nv;
  otl[j] = pick(ma | mb, std::max(ta, tb), el) + pick(mv, l0[j], l1[j]);
  otr[j] = pick(ma | mb, std::max(ua, ub), er) + pick(mv, r0[j], r1[j]);
}

PUFOTA_KERNEL void represser_range(std::size_t lo, std::size_t hi, std::ptrdiff_t delta,
                                   std::int32_t c, const std::int32_t* __restrict iv,
                                   const std::int32_t* __restrict itl,
                                   const std::int32_t* __restrict itr,
                                   std::int32_t* __restrict ov, std::int32_t* __restrict otl,
                                   std::int32_t* __restrict otr, const std::int32_t* __restrict l0, const std::int32_t* __restrict l1,
    const std::int32_t* __restrict r0, const std::int32_t* __restrict r1) {
  for (std::size_t j = lo; j < hi; ++j) {
    const std::size_t p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + delta);
    represser_gate(j, p, c, iv, itl, itr, ov, otl, otr, l0, l1, r0, r1);
  }
}

// Small offsets: partner inputs are first gathered into pv/ptl/ptr so the
// gate loop itself stays contiguous.
PUFOTA_KERNEL void represser_gathered(std::size_t w, std::size_t off,
                                      const std::int32_t* __restrict iv,
                                      const std::int32_t* __restrict itl,
                                      const std::int32_t* __restrict itr,
                                      const std::int32_t* __restrict pv,
                                      const std::int32_t* __restrict ptl,
                                      const std::int32_t* __restrict ptr,
                                      std::int32_t* __restrict ov, std::int32_t* __restrict otl,
                                      std::int32_t* __restrict otr,
                                      const std::int32_t* __restrict l0,
                                      const std::int32_t* __restrict l1,
                                      const std::int32_t* __restrict r0,
                                      const std::int32_t* __restrict r1) {
  const auto moff = static_cast<std::int32_t>(off);
  for (std::size_t j = 0; j < w; ++j) {
    const std::int32_t c = (static_cast<std::int32_t>(j) & moff) != 0;
    const std::int32_t a = iv[j];
    const std::int32_t b = pv[j];
    const std::int32_t ta = itl[j], tb = ptl[j], ua = itr[j], ub = ptr[j];
    const std::int32_t ma = -static_cast<std::int32_t>(a == c);
    const std::int32_t mb = -static_cast<std::int32_t>(b == c);
    const std::int32_t nv = 1 - ((a ^ c) & (b ^ c));
    const std::int32_t mv = -nv;
    const std::int32_t el = std::min(pick(ma, kNever, ta), pick(mb, kNever, tb));
    const std::int32_t er = std::min(pick(ma, kNever, ua), pick(mb, kNever, ub));
    ov[j] = nv;
    otl[j] = pick(ma | mb, std::max(ta, tb), el) + pick(mv, l0[j], l1[j]);
    otr[j] = pick(ma | mb, std::max(ua, ub), er) + pick(mv, r0[j], r1[j]);
  }
}

// Shared by the hardware instance and the public model, which is what makes
// the model bit-exact.
void run_netlist(std::size_t width, std::span<const LayerKind> pattern, const DelayTables& t,
                 ByteView challenge, std::span<std::uint8_t> response) {
  thread_local Scratch s;
  s.resize(width);
  const std::size_t w = width;
  auto rows = [&](std::size_t stage) {
    const std::size_t base = stage * 2 * w;
    return Rows{t.left.data() + base, t.left.data() + base + w, t.right.data() + base,
                t.right.data() + base + w};
  };
  Stage* in = &s.a;
  Stage* out = &s.b;

  {
    const Rows d = rows(0);
    std::int32_t* bits = s.bits.data();
    for (std::size_t i = 0; i < w / 8; ++i) {
      for (std::size_t k = 0; k < 8; ++k) bits[i * 8 + k] = (challenge[i] >> (7 - k)) & 1;
    }
    std::int32_t* v = in->val.data();
    std::int32_t* tl = in->tl.data();
    std::int32_t* tr = in->tr.data();
    for (std::size_t j = 0; j < w; ++j) {
      const std::int32_t m = -bits[j];
      v[j] = bits[j];
      tl[j] = pick(m, d.l0[j], d.l1[j]);
      tr[j] = pick(m, d.r0[j], d.r1[j]);
    }
  }

  const auto log2w = static_cast<std::size_t>(std::countr_zero(w));
  for (std::size_t layer = 0; layer < pattern.size(); ++layer) {
    const std::size_t off = std::size_t{1} << (layer % log2w);
    const Rows d = rows(layer + 1);
    const std::int32_t* iv = in->val.data();
    const std::int32_t* itl = in->tl.data();
    const std::int32_t* itr = in->tr.data();
    std::int32_t* ov = out->val.data();
    std::int32_t* otl = out->tl.data();
    std::int32_t* otr = out->tr.data();
    const auto soff = static_cast<std::ptrdiff_t>(off);
    const auto sw = static_cast<std::ptrdiff_t>(w);
    if (pattern[layer] == LayerKind::booster) {
      booster_range(0, w - off, soff, iv, itl, itr, ov, otl, otr, d.l0, d.l1, d.r0, d.r1);
      booster_range(w - off, w, soff - sw, iv, itl, itr, ov, otl, otr, d.l0, d.l1, d.r0, d.r1);
    } else if (off < 8) {
      std::int32_t* pv = s.pv.data();
      std::int32_t* ptl = s.ptl.data();
      std::int32_t* ptr = s.ptr.data();
      for (std::size_t j = 0; j < w; ++j) {
        pv[j] = iv[j ^ off];
        ptl[j] = itl[j ^ off];
        ptr[j] = itr[j ^ off];
      }
      represser_gathered(w, off, iv, itl, itr, pv, ptl, ptr, ov, otl, otr, d.l0, d.l1, d.r0,
                         d.r1);
    } else {
      for (std::size_t base = 0; base < w; base += 2 * off) {
        represser_range(base, base + off, soff, 0, iv, itl, itr, ov, otl, otr, d.l0, d.l1, d.r0, d.r1);
        represser_range(base + off, base + 2 * off, -soff, 1, iv, itl, itr, ov, otl, otr, d.l0, d.l1, d.r0, d.r1);
      }
    }
    std::swap(in, out);
  }

  const std::int32_t* tl = in->tl.data();
  const std::int32_t* tr = in->tr.data();
  std::int32_t* bits = s.bits.data();
  for (std::size_t j = 0; j < w; ++j) bits[j] = tl[j] < tr[j];
  for (std::size_t i = 0; i < w / 8; ++i) {
    std::uint32_t byte = 0;
    for (std::size_t k = 0; k < 8; ++k) byte = (byte << 1) | static_cast<std::uint32_t>(bits[i * 8 + k]);
    response[i] = static_cast<std::uint8_t>(byte);
  }
}

void check_challenge(std::size_t width, const Challenge& c) {
  if (c.size() != width) {
    throw ContractError("challenge has " + std::to_string(c.size()) + " bits, PPUF width is " +
                        std::to_string(width));
  }
}

char layer_char(LayerKind k) { return k == LayerKind::booster ? 'B' : 'R'; }

std::vector<LayerKind> parse_layers(std::string_view s) {
  std::vector<LayerKind> out;
  for (char c : s) {
    if (c == 'B') {
      out.push_back(LayerKind::booster);
    } else if (c == 'R') {
      out.push_back(LayerKind::represser);
    } else {
      throw DecodeError("invalid layer kind in model");
    }
  }
  return out;
}

void validate_tables(std::size_t width, std::size_t layers, const DelayTables& t) {
  const std::size_t expected = (layers + 1) * 2 * width;
  if (t.width != width || t.stages != layers + 1 || t.left.size() != expected ||
      t.right.size() != expected) {
    throw ConfigError("delay table shape does not match topology");
  }
}

}  // namespace

std::vector<LayerKind> default_layer_pattern() {
  using enum LayerKind;
  std::vector<LayerKind> p;
  for (int i = 0; i < 9; ++i) {
    p.push_back(booster);
    p.push_back(represser);
  }
  return p;
}

void DppufConfig::validate() const {
  if (width < 8 || !std::has_single_bit(width)) {
    throw ConfigError("dPPUF width must be a power of two >= 8");
  }
  if (layer_pattern.empty()) throw ConfigError("dPPUF layer pattern is empty");
  for (std::size_t i = 1; i < layer_pattern.size(); ++i) {
    if (layer_pattern[i] == layer_pattern[i - 1]) {
      throw ConfigError("dPPUF layer pattern must alternate booster/represser");
    }
  }
  if (!(delay.stddev_ps > 0.0)) throw ConfigError("delay stddev must be > 0");
  if (!(delay.mean_ps > 0.0)) throw ConfigError("delay mean must be > 0");
  // Worst-case path (8 sigma per gate) must fit the int32 femtosecond range.
  const double worst =
      static_cast<double>(layer_pattern.size() + 1) * (delay.mean_ps + 8 * delay.stddev_ps) * 1e3;
  if (worst >= 2.0e9) throw ConfigError("delay distribution too wide for the topology depth");
}

DppufInstance::DppufInstance(DppufConfig config, InstanceId id,
                             std::shared_ptr<const DelayTables> tables)
    : config_(std::move(config)), id_(id), tables_(std::move(tables)) {}

DppufInstance DppufInstance::build(const DppufConfig& config) {
  config.validate();
  Rng id_rng(mix_seed(config.seed, 0x1d));
  InstanceId id{};
  const Bytes raw = random_bytes(id_rng, id.size());
  std::copy(raw.begin(), raw.end(), id.begin());

  auto tables = std::make_shared<DelayTables>();
  tables->width = config.width;
  tables->stages = config.layer_pattern.size() + 1;
  const std::size_t cells = tables->stages * 2 * config.width;
  Rng delay_rng(mix_seed(config.seed, 0xde1a));
  auto sample = [&](std::vector<std::int32_t>& out) {
    out.resize(cells);
    for (auto& d : out) {
      const double ps = config.delay.mean_ps + config.delay.stddev_ps * standard_normal(delay_rng);
      d = std::max<std::int32_t>(1, static_cast<std::int32_t>(std::lround(ps * 1e3)));
    }
  };
  sample(tables->left);
  sample(tables->right);
  return DppufInstance(config, id, std::move(tables));
}

DppufInstance DppufInstance::from_tables(const DppufConfig& config, const InstanceId& id,
                                         DelayTables tables) {
  config.validate();
  validate_tables(config.width, config.layer_pattern.size(), tables);
  return DppufInstance(config, id, std::make_shared<const DelayTables>(std::move(tables)));
}

Response DppufInstance::evaluate(const Challenge& challenge) const {
  check_challenge(width(), challenge);
  Response r(width());
  run_netlist(width(), config_.layer_pattern, *tables_, challenge.bytes(), r.mutable_bytes());
  return r;
}

void DppufInstance::evaluate_into(ByteView challenge, std::span<std::uint8_t> response) const {
  if (challenge.size() * 8 != width() || response.size() * 8 != width()) {
    throw ContractError("challenge/response buffer does not match PPUF width");
  }
  run_netlist(width(), config_.layer_pattern, *tables_, challenge, response);
}

Response evaluate(const DppufInstance& instance, const Challenge& challenge, Meter& meter) {
  Response r = instance.evaluate(challenge);
  meter.charge(WorkKind::ppuf_hw, 1);
  return r;
}

PpufModel export_model(const DppufInstance& instance, VirtualTime simulation_cost_per_eval) {
  return PpufModel{instance.id(), instance.width(), instance.config().layer_pattern,
                   instance.tables(), simulation_cost_per_eval};
}

namespace {
Response simulate_pure(const PpufModel& model, const Challenge& challenge) {
  check_challenge(model.width, challenge);
  validate_tables(model.width, model.layer_pattern.size(), model.tables);
  Response r(model.width);
  run_netlist(model.width, model.layer_pattern, model.tables, challenge.bytes(), r.mutable_bytes());
  return r;
}
}  // namespace

Response simulate_model(const PpufModel& model, const Challenge& challenge, Meter& meter) {
  Response r = simulate_pure(model, challenge);
  meter.charge(WorkKind::ppuf_sim, 1);
  return r;
}

Response simulate_model(const PpufModel& model, const Challenge& challenge, VirtualClock& clock) {
  Response r = simulate_pure(model, challenge);
  clock.advance(model.simulation_cost_per_eval);
  return r;
}

std::string serialize_model(const PpufModel& model) {
  std::ostringstream os;
  os << "pufota-ppuf-model 1\n";
  os << "id " << to_hex(model.id) << '\n';
  os << "width " << model.width << '\n';
  os << "layers ";
  for (auto k : model.layer_pattern) os << layer_char(k);
  os << '\n';
  os << "simulation-cost-ns " << model.simulation_cost_per_eval << '\n';
  auto dump = [&](std::string_view name, const std::vector<std::int32_t>& table) {
    os << name << '\n';
    for (std::size_t r = 0; r < model.tables.stages * 2; ++r) {
      for (std::size_t j = 0; j < model.width; ++j) {
        if (j) os << ' ';
        os << table[r * model.width + j];
      }
      os << '\n';
    }
  };
  dump("left", model.tables.left);
  dump("right", model.tables.right);
  os << "end\n";
  return os.str();
}

PpufModel parse_model(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  auto next = [&]() -> std::string& {
    if (!std::getline(is, line)) throw DecodeError("truncated model file");
    return line;
  };
  auto field = [&](std::string_view key) {
    const std::string& l = next();
    if (l.rfind(std::string(key) + " ", 0) != 0) {
      throw DecodeError("model file: expected '" + std::string(key) + "'");
    }
    return l.substr(key.size() + 1);
  };
  if (next() != "pufota-ppuf-model 1") throw DecodeError("unsupported model file version");

  PpufModel m;
  const Bytes id = from_hex(field("id"));
  if (id.size() != m.id.size()) throw DecodeError("model id must be 16 bytes");
  std::copy(id.begin(), id.end(), m.id.begin());
  try {
    m.width = std::stoull(field("width"));
    m.layer_pattern = parse_layers(field("layers"));
    m.simulation_cost_per_eval = std::stoll(field("simulation-cost-ns"));
  } catch (const std::logic_error&) {
    throw DecodeError("malformed model header");
  }
  if (m.width < 8 || !std::has_single_bit(m.width) || m.layer_pattern.empty()) {
    throw DecodeError("invalid model topology");
  }
  m.tables.width = m.width;
  m.tables.stages = m.layer_pattern.size() + 1;
  auto load = [&](std::string_view name, std::vector<std::int32_t>& table) {
    if (next() != name) throw DecodeError("model file: expected table " + std::string(name));
    table.clear();
    table.reserve(m.tables.stages * 2 * m.width);
    for (std::size_t r = 0; r < m.tables.stages * 2; ++r) {
      std::istringstream row(next());
      for (std::size_t j = 0; j < m.width; ++j) {
        long long v = 0;
        if (!(row >> v) || v < 1 || v > std::numeric_limits<std::int32_t>::max()) {
          throw DecodeError("model file: bad delay value");
        }
        table.push_back(static_cast<std::int32_t>(v));
      }
      std::string extra;
      if (row >> extra) throw DecodeError("model file: row too long");
    }
  };
  load("left", m.tables.left);
  load("right", m.tables.right);
  if (next() != "end") throw DecodeError("model file: missing end marker");
  return m;
}

Challenge challenge_for_element(const crypto::CryptoProfile& profile, std::uint64_t element,
                                std::size_t width) {
  Bytes encoded;
  put_le(encoded, element, 8);
  Bytes stream = crypto::hash(profile, encoded);
  for (std::uint32_t k = 1; stream.size() * 8 < width; ++k) {
    Bytes ext = encoded;
    put_le(ext, k, 4);
    const Bytes more = crypto::hash(profile, ext);
    stream.insert(stream.end(), more.begin(), more.end());
  }
  return Challenge::from_bytes(stream, width);
}

SacReport sac_report(const DppufInstance& instance, std::size_t num_vectors, std::uint64_t seed) {
  if (num_vectors < 100) throw ContractError("SAC needs at least 100 vectors");
  const std::size_t w = instance.width();
  Rng rng(seed);
  SacReport report;
  report.vectors = num_vectors;
  report.histogram.assign(w + 1, 0);
  Bytes challenge(w / 8);
  Bytes r1(w / 8);
  Bytes r2(w / 8);
  std::uint64_t switched = 0;
  for (std::size_t v = 0; v < num_vectors; ++v) {
    const Bytes fresh = random_bytes(rng, w / 8);
    std::copy(fresh.begin(), fresh.end(), challenge.begin());
    const std::size_t pos = uniform_below(rng, w);
    instance.evaluate_into(challenge, r1);
    challenge[pos >> 3] ^= static_cast<std::uint8_t>(0x80u >> (pos & 7));
    instance.evaluate_into(challenge, r2);
    std::size_t flips = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) {
      flips += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(r1[i] ^ r2[i])));
    }
    ++report.histogram[flips];
    switched += flips;
  }
  report.mean = static_cast<double>(switched) / (static_cast<double>(num_vectors) * static_cast<double>(w));
  return report;
}

double sac_metric(const DppufInstance& instance, std::size_t num_vectors, std::uint64_t seed) {
  return sac_report(instance, num_vectors, seed).mean;
}

namespace {

bool reproduces(const fuzzy::FuzzyExtractor& fe, const Response& noisy,
                const fuzzy::HelperData& helper, const Bytes& key) {
  try {
    return fe.reproduce(noisy, helper) == key;
  } catch (const ExtractionError&) {
    return false;
  }
}

// Hot loop shared by the hardware and simulated searches. `eval` fills the
// response buffer for a challenge buffer.
template <typename Eval>
SearchOutcome scan(std::size_t width, const SetDescriptor& set, const Response& target,
                   const crypto::CryptoProfile& profile, Eval&& eval,
                   const SearchOptions& options) {
  set.validate();
  if (target.size() != width) throw ContractError("target response width mismatch");
  SearchOutcome out;
  const std::size_t dbytes = crypto::digest_size(profile.hash);
  const bool direct = dbytes * 8 >= width;
  Bytes digest(dbytes);
  Bytes encoded(8);
  Bytes response(width / 8);
  const ByteView target_bytes = target.bytes();

  std::optional<fuzzy::Enrollment> enrolled;
  if (options.noise_flips > 0) {
    if (options.extractor == nullptr) throw ContractError("noisy search needs a fuzzy extractor");
    enrolled = options.extractor->generate(target, profile.hash, mix_seed(options.noise_seed, 0xe1));
  }

  for (std::uint64_t k = 0; k < set.n; ++k) {
    const std::uint64_t element = set.s0 + k;
    if (direct) {
      for (int b = 0; b < 8; ++b) encoded[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(element >> (8 * b));
      crypto::digest_into(profile.hash, encoded, digest);
      eval(ByteView(digest.data(), width / 8), std::span<std::uint8_t>(response));
    } else {
      const Challenge c = challenge_for_element(profile, element, width);
      eval(c.bytes(), std::span<std::uint8_t>(response));
    }

    bool match;
    if (!enrolled) {
      match = std::memcmp(response.data(), target_bytes.data(), response.size()) == 0;
    } else {
      Response noisy = Response::from_bytes(response, width);
      noisy = fuzzy::apply_noise(noisy, options.noise_flips, mix_seed(options.noise_seed, element));
      match = options.extractor->within_capacity(noisy, target) &&
              reproduces(*options.extractor, noisy, enrolled->helper, enrolled->key);
    }
    if (match) {
      if (!out.element) out.element = element;
      ++out.matches;
    }
  }
  out.candidates = set.n;
  return out;
}

}  // namespace

SearchOutcome search_preimage(const DppufInstance& instance, const SetDescriptor& set,
                              const Response& target, const crypto::CryptoProfile& profile,
                              Meter& meter, const SearchOptions& options) {
  auto out = scan(instance.width(), set, target, profile,
                  [&](ByteView c, std::span<std::uint8_t> r) { instance.evaluate_into(c, r); },
                  options);
  meter.charge(WorkKind::hash, out.candidates);
  meter.charge(WorkKind::ppuf_hw, out.candidates);
  return out;
}

SearchOutcome search_preimage_simulated(const PpufModel& model, const SetDescriptor& set,
                                        const Response& target,
                                        const crypto::CryptoProfile& profile, Meter& meter) {
  validate_tables(model.width, model.layer_pattern.size(), model.tables);
  auto out = scan(model.width, set, target, profile,
                  [&](ByteView c, std::span<std::uint8_t> r) {
                    run_netlist(model.width, model.layer_pattern, model.tables, c, r);
                  },
                  {});
  meter.charge(WorkKind::hash, out.candidates);
  meter.charge(WorkKind::ppuf_sim, out.candidates);
  return out;
}

}  // namespace pufota::dppuf
