// Copyright 2026 The pgc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pgc/protocol.hpp"

#include <chrono>
#include <thread>

#include "pgc/garbling.hpp"
#include "pgc/partial.hpp"

namespace pgc::protocol {

using circuit::AugmentedCircuit;
using circuit::CircuitIR;
using crypto::Prg;
using garbling::GarblingContext;
using partial::GateDomain;
using partial::InputGate;
using transport::Frame;
using transport::ProtocolAbort;

namespace {

// Frame types.
constexpr std::uint8_t kHello = 0x01;
constexpr std::uint8_t kKeyHashes = 0x02;
constexpr std::uint8_t kSplitClaims = 0x03;
constexpr std::uint8_t kPackages = 0x04;
constexpr std::uint8_t kCommitments = 0x05;
constexpr std::uint8_t kPartialGates = 0x40;
constexpr std::uint8_t kRemap = 0x41;
constexpr std::uint8_t kCircuit = 0x50;
constexpr std::uint8_t kOutput = 0x60;
constexpr std::uint8_t kStatus = 0x61;

[[noreturn]] void abort_with(AbortKind kind, std::uint8_t phase, const std::string& detail) {
  throw ProtocolAbort(kind, phase, detail);
}

Bytes digest_bytes(const crypto::Digest& d) { return Bytes(d.begin(), d.end()); }

void check_config(const ProtocolConfig& cfg) {
  try {
    garbling::check_label_bits(cfg.label_bits);
  } catch (const Error& e) {
    abort_with(AbortKind::kConfig, 1, e.what());
  }
  if (cfg.encoding_width == 0) abort_with(AbortKind::kConfig, 1, "encoding width must be >= 1");
  if (cfg.mode == Mode::kSemiHonest && cfg.circuits != 1) {
    abort_with(AbortKind::kConfig, 1, "semi-honest mode runs exactly one circuit");
  }
  if (cfg.mode == Mode::kMalicious && cfg.circuits < 5) {
    abort_with(AbortKind::kConfig, 1, "malicious mode needs at least 5 circuits");
  }
}

void exchange_hello(const ProtocolConfig& cfg, Link& a, Link& b) {
  const Bytes mine = digest_bytes(cfg.digest());
  a.send(1, kHello, mine);
  b.send(1, kHello, mine);
  for (Link* l : {&a, &b}) {
    const Frame f = l->expect(1, kHello);
    if (f.payload != mine) {
      abort_with(AbortKind::kConfig, 1, "configuration differs from " + l->peer() +
                                            " (program, S, K, encoding, tag bits, mode or t)");
    }
  }
}

AugmentedCircuit augment(const ProtocolConfig& cfg) {
  return circuit::augment_for_protocol(
      cfg.circuit,
      circuit::AugmentationSpec::for_circuit(cfg.circuit, cfg.tag_bits, cfg.encoding_width));
}

void check_prior(const ProtocolConfig& cfg, const std::optional<state::SavedState>& prior,
                 Role role, const CircuitIR& c) {
  const std::uint64_t t = cfg.execution;
  if (t == 0) {
    if (c.partial_input_count != 0) {
      abort_with(AbortKind::kState, 1, "no prior execution: partial inputs need saved wires");
    }
    return;
  }
  if (!prior) abort_with(AbortKind::kState, 1, "no prior execution for t=" + std::to_string(t));
  const auto& s = *prior;
  if (s.role != role) abort_with(AbortKind::kState, 1, "saved state belongs to another role");
  if (s.poisoned) {
    abort_with(AbortKind::kState, 1, "chain is poisoned by an earlier cheating detection");
  }
  if (s.next_execution != t) {
    abort_with(AbortKind::kState, 1, "saved state is for t=" + std::to_string(s.next_execution) +
                                         ", not t=" + std::to_string(t));
  }
  if (s.circuits != cfg.circuits || s.label_bits != cfg.label_bits || s.mode != cfg.mode) {
    abort_with(AbortKind::kState, 1, "saved state was made with different S, K or mode");
  }
  if (s.wire_count() != c.partial_input_count) {
    abort_with(AbortKind::kState, 1,
               "saved state holds " + std::to_string(s.wire_count()) + " wires but the program " +
                   "expects " + std::to_string(c.partial_input_count) + " partial inputs");
  }
}

// ---------------------------------------------------------------------------
// Phase 5 material of one circuit.

struct Material {
  std::vector<InputGate> gen_gates;
  std::vector<InputGate> evl_gates;
  std::vector<garbling::GarbledGate> and_gates;
  std::vector<garbling::DecodeEntry> decode;
};

using Pairs = std::vector<std::pair<Block, Block>>;

std::vector<circuit::WireId> output_wires(const CircuitIR& c) {
  std::vector<circuit::WireId> w = c.evl_outputs;
  w.insert(w.end(), c.gen_outputs.begin(), c.gen_outputs.end());
  return w;
}

Material build_material(const GarblingContext& ctx, const CircuitIR& c, const Pairs& gen_hashes,
                        const Pairs& evl_values) {
  Material m;
  const unsigned k = ctx.label_bits;
  for (std::uint32_t j = 0; j < c.gen_input_count; ++j) {
    const auto w = c.gen_input(j);
    m.gen_gates.push_back(partial::make_input_gate(gen_hashes[j].first, gen_hashes[j].second,
                                                   ctx.label(w, false), ctx.label(w, true),
                                                   ctx.seed, GateDomain::kGenInput, j, k));
  }
  for (std::uint32_t j = 0; j < c.evl_input_count; ++j) {
    const auto w = c.evl_input(j);
    m.evl_gates.push_back(partial::make_input_gate(evl_values[j].first, evl_values[j].second,
                                                   ctx.label(w, false), ctx.label(w, true),
                                                   ctx.seed, GateDomain::kEvlInput, j, k));
  }
  m.and_gates = garbling::garble_circuit(ctx, c);
  m.decode = garbling::make_decode_table(ctx, output_wires(c));
  return m;
}

Bytes encode_material(const Material& m, unsigned k) {
  ByteWriter w;
  for (const auto& g : m.gen_gates) g.encode(w, k);
  for (const auto& g : m.evl_gates) g.encode(w, k);
  for (const auto& g : m.and_gates) g.encode(w, k);
  garbling::encode_decode_table(w, m.decode);
  return std::move(w).take();
}

Material decode_material(std::span<const std::uint8_t> data, const CircuitIR& c, unsigned k) {
  ByteReader r(data);
  Material m;
  for (std::uint32_t j = 0; j < c.gen_input_count; ++j) m.gen_gates.push_back(InputGate::decode(r, k));
  for (std::uint32_t j = 0; j < c.evl_input_count; ++j) m.evl_gates.push_back(InputGate::decode(r, k));
  const std::size_t ands = c.and_count();
  for (std::size_t j = 0; j < ands; ++j) m.and_gates.push_back(garbling::GarbledGate::decode(r, k));
  m.decode = garbling::decode_decode_table(r, c.evl_outputs.size() + c.gen_outputs.size());
  r.expect_done("circuit material");
  return m;
}

// Counts compared units; returns a description of the first mismatch.
std::optional<std::string> compare_material(const Material& expected, const Material& got,
                                            std::uint64_t& compared, std::uint64_t& mismatches) {
  std::optional<std::string> first;
  auto note = [&](bool equal, const std::string& what) {
    ++compared;
    if (!equal) {
      ++mismatches;
      if (!first) first = what;
    }
  };
  for (std::size_t j = 0; j < expected.gen_gates.size(); ++j) {
    note(expected.gen_gates[j] == got.gen_gates[j], "generator input gate " + std::to_string(j));
  }
  for (std::size_t j = 0; j < expected.evl_gates.size(); ++j) {
    note(expected.evl_gates[j] == got.evl_gates[j], "evaluator input gate " + std::to_string(j));
  }
  for (std::size_t j = 0; j < expected.and_gates.size(); ++j) {
    note(garbling::verify_gate(expected.and_gates[j], got.and_gates[j]),
         "garbled gate " + std::to_string(expected.and_gates[j].gate_id));
  }
  note(expected.decode == got.decode, "output decoding table");
  return first;
}

// Generator-side fault injection on finished material.
void tamper_material(Material& m, const GarblingContext& ctx, const CircuitIR& c,
                     const Tamper& tamper) {
  if (!tamper.hits(ctx.circuit_index) || m.and_gates.empty()) return;
  const std::size_t k = tamper.index % m.and_gates.size();
  if (tamper.is(Tamper::Kind::kGateRow)) {
    for (Block& row : m.and_gates[k].rows) row.set_bit(ctx.label_bits, !row.bit(ctx.label_bits));
  } else if (tamper.is(Tamper::Kind::kWrongFunction)) {
    std::size_t seen = 0;
    for (const auto& g : c.gates) {
      if (g.op != circuit::Op::kAnd) continue;
      if (seen++ != k) continue;
      GarblingContext flipped = ctx;
      flipped.label0[g.id] ^= ctx.delta;  // rows now carry NAND
      m.and_gates[k] = garbling::garble_gate(flipped, g);
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Circuit packages.

struct EvalPackage {
  Block ikey;
  std::vector<Block> witness;
};

struct CheckPackage {
  Block cseed;
  Pairs evl_values;    // (v0, v1) per evaluator input, true order
  Pairs evl_openings;  // (o0, o1)
  Pairs gen_hashes;    // (t0, t1) per generator input, true order
};

Bytes encode_eval(const EvalPackage& p, unsigned k) {
  ByteWriter w;
  w.block(p.ikey, k);
  for (const Block& b : p.witness) w.block(b, k);
  return std::move(w).take();
}

EvalPackage decode_eval(std::span<const std::uint8_t> data, std::size_t gen_inputs, unsigned k) {
  ByteReader r(data);
  EvalPackage p;
  p.ikey = r.block(k);
  for (std::size_t j = 0; j < gen_inputs; ++j) p.witness.push_back(r.block(k));
  r.expect_done("evaluation package");
  return p;
}

Bytes encode_check(const CheckPackage& p, unsigned k) {
  ByteWriter w;
  w.block(p.cseed, k);
  for (std::size_t j = 0; j < p.evl_values.size(); ++j) {
    w.block(p.evl_values[j].first, k);
    w.block(p.evl_openings[j].first, k);
    w.block(p.evl_values[j].second, k);
    w.block(p.evl_openings[j].second, k);
  }
  for (const auto& [a, b] : p.gen_hashes) {
    w.block(a, k);
    w.block(b, k);
  }
  return std::move(w).take();
}

CheckPackage decode_check(std::span<const std::uint8_t> data, std::size_t evl_inputs,
                          std::size_t gen_inputs, unsigned k) {
  ByteReader r(data);
  CheckPackage p;
  p.cseed = r.block(k);
  for (std::size_t j = 0; j < evl_inputs; ++j) {
    const Block v0 = r.block(k);
    const Block o0 = r.block(k);
    const Block v1 = r.block(k);
    const Block o1 = r.block(k);
    p.evl_values.emplace_back(v0, v1);
    p.evl_openings.emplace_back(o0, o1);
  }
  for (std::size_t j = 0; j < gen_inputs; ++j) {
    const Block a = r.block(k);
    const Block b = r.block(k);
    p.gen_hashes.emplace_back(a, b);
  }
  r.expect_done("check package");
  return p;
}

// Commitment order bits, hidden from the cloud unless it holds the seed.
Bits commitment_order(const Block& cseed, std::uint32_t circuit, std::size_t count) {
  Prg prg(cseed, crypto::make_tweak(crypto::Domain::kContext, circuit, 1));
  Bits out;
  for (std::size_t j = 0; j < count; ++j) out.push_back(prg.next_bit() ? 1 : 0);
  return out;
}

Bits random_bits(Prg& prg, std::size_t n) {
  Bits b(n);
  for (auto& x : b) x = prg.next_bit() ? 1 : 0;
  return b;
}

Block distinct_label(Prg& prg, const Block& other, unsigned k) {
  for (;;) {
    const Block b = prg.label(k);
    if (b != other) return b;
  }
}

Bytes encode_bits(std::span<const std::uint8_t> bits) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(bits.size()));
  w.bits(bits);
  return std::move(w).take();
}

Bits decode_bits(std::span<const std::uint8_t> data, std::size_t expected, std::uint8_t phase) {
  ByteReader r(data);
  const std::uint32_t n = r.u32();
  if (n != expected) {
    abort_with(AbortKind::kCheatCloud, phase,
               "output has " + std::to_string(n) + " bits, expected " + std::to_string(expected));
  }
  Bits b = r.bits(n);
  r.expect_done("output frame");
  return b;
}

// Sends acceptance to both peers and waits for the other party's verdict.
void exchange_status(Link& to_other_party, Link& to_cloud) {
  to_other_party.send(6, kStatus, Bytes{1});
  to_cloud.send(6, kStatus, Bytes{1});
  to_other_party.expect(6, kStatus);
}

template <class Body>
PartyResult guarded(Role role, const ProtocolConfig& cfg, Link& a, Link& b, Body&& body) {
  PartyResult res;
  res.report.role = role;
  const auto start = std::chrono::steady_clock::now();
  a.set_exec_id(cfg.execution);
  b.set_exec_id(cfg.execution);
  auto broadcast = [&](const AbortInfo& info) {
    for (Link* l : {&a, &b}) {
      try {
        l->send_abort(info.phase == 0 ? 1 : info.phase, info.kind, info.detail);
      } catch (...) {
        // The peer may already be gone.
      }
    }
  };
  try {
    body(res);
    res.report.ok = true;
  } catch (const ProtocolAbort& e) {
    AbortInfo info{e.kind(), e.phase(), e.detail(), e.remote()};
    res.report.abort = info;
    res.next_state.reset();
    broadcast(info);
  } catch (const std::exception& e) {
    AbortInfo info{AbortKind::kProtocol, 0, e.what(), false};
    res.report.abort = info;
    res.next_state.reset();
    broadcast(info);
  }
  res.report.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  for (Link* l : {&a, &b}) {
    res.report.bytes_sent[l->peer()] = l->bytes_sent();
    res.report.bytes_received[l->peer()] = l->bytes_received();
  }
  return res;
}

ot::ExtensionOptions extension_options(const ProtocolConfig& cfg) {
  ot::ExtensionOptions o;
  o.base_count = cfg.label_bits;
  o.base_kind = cfg.base_ot;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------

crypto::Digest ProtocolConfig::digest() const {
  crypto::Sha256 h;
  h.update(std::string_view("pgc-config"));
  h.update(std::string_view(circuit::circuit_digest_hex(circuit)));
  h.update_u64(circuits).update_u64(label_bits).update_u64(encoding_width).update_u64(tag_bits);
  h.update_u64(static_cast<std::uint64_t>(mode)).update_u64(static_cast<std::uint64_t>(base_ot));
  h.update_u64(execution);
  return h.finish();
}

std::uint64_t PartyReport::total_sent() const {
  std::uint64_t n = 0;
  for (const auto& [_, v] : bytes_sent) n += v;
  return n;
}

std::uint64_t PartyReport::total_received() const {
  std::uint64_t n = 0;
  for (const auto& [_, v] : bytes_received) n += v;
  return n;
}

std::optional<Bits> majority_vote(const std::vector<Bits>& outputs) {
  if (outputs.empty()) return std::nullopt;
  const std::size_t width = outputs.front().size();
  Bits out(width, 0);
  for (std::size_t x = 0; x < width; ++x) {
    std::size_t ones = 0;
    for (const auto& o : outputs) ones += o.at(x);
    if (2 * ones == outputs.size()) return std::nullopt;
    out[x] = 2 * ones > outputs.size() ? 1 : 0;
  }
  return out;
}

Bits verify_output(std::span<const std::uint8_t> received, std::span<const std::uint8_t> pad,
                   std::span<const std::uint8_t> mac_key, std::size_t data_bits,
                   std::uint32_t tag_bits) {
  if (data_bits == 0) return {};
  const std::size_t tag = tag_bits;
  if (received.size() != data_bits + tag || pad.size() != received.size()) {
    abort_with(AbortKind::kCheatCloud, 6, "output has the wrong length");
  }
  Bits plain(received.size());
  for (std::size_t i = 0; i < plain.size(); ++i) plain[i] = received[i] ^ pad[i];
  Bits data(plain.begin(), plain.begin() + static_cast<std::ptrdiff_t>(data_bits));
  if (tag_bits > 0) {
    const Bits expected = circuit::toeplitz_mac(mac_key, data, tag_bits);
    if (!std::equal(expected.begin(), expected.end(), plain.begin() + static_cast<std::ptrdiff_t>(data_bits))) {
      abort_with(AbortKind::kCheatCloud, 6, "output MAC mismatch: the cloud modified the output");
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Generator.

PartyResult run_generator(const ProtocolConfig& cfg, Link& evl, Link& cloud,
                          const PartyParams& params) {
  return guarded(Role::kGenerator, cfg, evl, cloud, [&](PartyResult& res) {
    check_config(cfg);
    exchange_hello(cfg, evl, cloud);
    const unsigned K = cfg.label_bits;
    const std::uint32_t S = cfg.circuits;
    const std::uint64_t t = cfg.execution;
    const bool malicious = cfg.mode == Mode::kMalicious;
    const Tamper& tamper = params.tamper;
    const AugmentedCircuit aug = augment(cfg);
    const CircuitIR& C = aug.circuit;
    const auto& lay = aug.layout;
    res.report.and_gates = C.and_count();
    check_prior(cfg, params.prior, Role::kGenerator, C);
    if (params.input.size() != cfg.circuit.gen_input_count) {
      abort_with(AbortKind::kConfig, 1, "generator input has the wrong number of bits");
    }
    Prg prg(params.seed);
    auto& stats = res.report.ot;
    const auto ext = extension_options(cfg);

    // Phase 1: keys, split hashes, packages.
    std::vector<cnc::CircuitKeyPair> keys;
    if (malicious) {
      if (t == 0) {
        keys = cnc::make_key_pairs(S, K, prg);
        try {
          cnc::cut_and_choose_ot_send(cloud, 1, ext, keys, prg, stats);
        } catch (const ot::OtConsistencyError& e) {
          abort_with(AbortKind::kCheatCloud, 1, e.what());
        }
      } else {
        keys = cnc::evolve_keys(params.prior->keys.pairs, K);
      }
      auto hashes = cnc::key_hash_pairs(keys, K);
      ByteWriter w;
      for (std::uint32_t i = 0; i < S; ++i) {
        auto h = hashes[i];
        if (tamper.is(Tamper::Kind::kKeyHashSwap) && tamper.hits(i)) std::swap(h.check_hash, h.eval_hash);
        w.block(h.check_hash, 128);
        w.block(h.eval_hash, 128);
      }
      evl.send(1, kKeyHashes, std::move(w).take());
    }

    const Bits pad = random_bits(prg, lay.gen_pad_bits);
    const Bits mac_key = random_bits(prg, lay.gen_mac_key_bits);
    const Bits x = lay.gen_input(params.input, pad, mac_key);
    const std::uint32_t G = C.gen_input_count;
    const std::uint32_t E = C.evl_input_count;
    const std::uint32_t P = C.partial_input_count;

    std::vector<Block> cseed(S), ikey(S);
    for (std::uint32_t i = 0; i < S; ++i) {
      cseed[i] = prg.label(K);
      ikey[i] = prg.label(K);
    }
    Pairs witness(G), seeds(E);
    std::vector<Block> w(G);
    for (std::uint32_t j = 0; j < G; ++j) {
      witness[j].first = prg.label(K);
      witness[j].second = distinct_label(prg, witness[j].first, K);
      w[j] = x[j] ? witness[j].second : witness[j].first;
    }
    for (std::uint32_t j = 0; j < E; ++j) {
      seeds[j].first = prg.label(K);
      seeds[j].second = distinct_label(prg, seeds[j].first, K);
    }
    std::vector<GarblingContext> ctx;
    for (std::uint32_t i = 0; i < S; ++i) ctx.push_back(garbling::derive_context(cseed[i], i, C, K));

    std::vector<Pairs> gen_hashes(S), evl_values(S);
    ByteWriter packages, commitments;
    for (std::uint32_t i = 0; i < S; ++i) {
      EvalPackage ep{ikey[i], w};
      if (tamper.is(Tamper::Kind::kWitness) && tamper.hits(i) && G > 0) {
        const auto j = tamper.index % G;
        ep.witness[j] = x[j] ? witness[j].first : witness[j].second;
      }
      CheckPackage cp;
      cp.cseed = cseed[i];
      for (std::uint32_t j = 0; j < G; ++j) {
        cp.gen_hashes.emplace_back(partial::gen_input_hash(ikey[i], witness[j].first, i, j, K),
                                   partial::gen_input_hash(ikey[i], witness[j].second, i, j, K));
      }
      const Bits order = commitment_order(cseed[i], i, E);
      for (std::uint32_t j = 0; j < E; ++j) {
        const Block v0 = ot::evl_input_value(ikey[i], seeds[j].first, i, j, K);
        const Block v1 = ot::evl_input_value(ikey[i], seeds[j].second, i, j, K);
        const Block o0 = ot::evl_input_opening(ikey[i], seeds[j].first, i, j, K);
        const Block o1 = ot::evl_input_opening(ikey[i], seeds[j].second, i, j, K);
        ot::Commitment com[2];
        com[order[j]] = ot::commit_label(v0, o0, i, j);
        com[order[j] ^ 1] = ot::commit_label(v1, o1, i, j);
        commitments.bytes(com[0]);
        commitments.bytes(com[1]);
        cp.evl_values.emplace_back(v0, v1);
        cp.evl_openings.emplace_back(o0, o1);
      }
      if (tamper.is(Tamper::Kind::kEvlSwap) && tamper.hits(i) && E > 0) {
        const auto j = tamper.index % E;
        std::swap(cp.evl_values[j].first, cp.evl_values[j].second);
        std::swap(cp.evl_openings[j].first, cp.evl_openings[j].second);
      }
      gen_hashes[i] = cp.gen_hashes;
      evl_values[i] = cp.evl_values;
      const Bytes eval_plain = encode_eval(ep, K);
      if (malicious) {
        packages.var_bytes(cnc::seal_package(keys[i].eval_key, i, t, cnc::kEvalPackage, eval_plain));
        packages.var_bytes(
            cnc::seal_package(keys[i].check_key, i, t, cnc::kCheckPackage, encode_check(cp, K)));
      } else {
        packages.var_bytes(eval_plain);
      }
    }
    cloud.send(1, kPackages, std::move(packages).take());
    if (malicious) cloud.send(1, kCommitments, std::move(commitments).take());

    // Phase 2: outsourced OT of the evaluator-input seeds.
    try {
      ot::oot_generator(evl, cloud, 2, ext, seeds, K, prg, stats);
    } catch (const ot::OtConsistencyError& e) {
      abort_with(AbortKind::kCheatEvaluator, 2, e.what());
    }

    // Phase 4: partial input gates.
    if (P > 0) {
      ByteWriter pw;
      for (std::uint32_t i = 0; i < S; ++i) {
        Pairs pouts;
        for (const auto& rec : params.prior->wires[i]) pouts.emplace_back(rec.slot0, rec.slot1);
        if (!malicious) {
          for (std::uint32_t j = 0; j < P; ++j) {
            const auto wire = C.partial_input(j);
            const auto m = partial::semi_honest_messages(pouts[j].first, pouts[j].second,
                                                         ctx[i].label(wire, false),
                                                         ctx[i].label(wire, true));
            pw.block(m.first, K);
            pw.block(m.second, K);
          }
          continue;
        }
        Block r = partial::derive_transform(cseed[i], i, K);
        if (tamper.is(Tamper::Kind::kTransform) && tamper.hits(i)) r ^= Block{1, 0};
        auto batch = partial::generate_partial_input_gates(pouts, ctx[i], C, r);
        if (tamper.is(Tamper::Kind::kPartialRow) && tamper.hits(i)) {
          Block& row = batch.gates[tamper.index % P].rows[0];
          row.set_bit(0, !row.bit(0));
        }
        batch.encode(pw, K);
      }
      cloud.send(4, malicious ? kPartialGates : kRemap, std::move(pw).take());
    }

    // Phase 5: stream every circuit.
    for (std::uint32_t i = 0; i < S; ++i) {
      Pairs evl_pairs = evl_values[i];
      Material m = build_material(ctx[i], C, gen_hashes[i], evl_pairs);
      tamper_material(m, ctx[i], C, tamper);
      cloud.send(5, kCircuit, encode_material(m, K));
    }

    // Phase 6: verified output.
    const Frame of = cloud.expect(6, kOutput);
    const Bits received = decode_bits(of.payload, C.gen_outputs.size(), 6);
    res.report.output =
        verify_output(received, pad, mac_key, lay.gen_output_data_bits, lay.gen_has_mac() ? lay.tag_bits : 0);
    exchange_status(evl, cloud);

    // Phase 7: keep both labels of every saved wire.
    state::SavedState next;
    next.role = Role::kGenerator;
    next.mode = cfg.mode;
    next.next_execution = t + 1;
    next.circuits = S;
    next.label_bits = K;
    next.keys.role = Role::kGenerator;
    next.keys.split.selection.assign(S, 0);  // the generator never learns the split
    next.keys.pairs = keys;
    for (std::uint32_t i = 0; i < S; ++i) {
      next.wires.push_back(partial::save_partial_outputs(&ctx[i], C, true, nullptr));
    }
    res.next_state = std::move(next);
  });
}

// ---------------------------------------------------------------------------
// Evaluator.

PartyResult run_evaluator(const ProtocolConfig& cfg, Link& gen, Link& cloud,
                          const PartyParams& params) {
  return guarded(Role::kEvaluator, cfg, gen, cloud, [&](PartyResult& res) {
    check_config(cfg);
    exchange_hello(cfg, gen, cloud);
    const std::uint32_t S = cfg.circuits;
    const AugmentedCircuit aug = augment(cfg);
    const CircuitIR& C = aug.circuit;
    const auto& lay = aug.layout;
    res.report.and_gates = C.and_count();
    if (params.input.size() != cfg.circuit.evl_input_count) {
      abort_with(AbortKind::kConfig, 1, "evaluator input has the wrong number of bits");
    }
    Prg prg(params.seed);

    if (cfg.mode == Mode::kMalicious) {
      const Frame hf = gen.expect(1, kKeyHashes);
      ByteReader hr(hf.payload);
      std::vector<cnc::KeyHashPair> pairs(S);
      for (auto& p : pairs) {
        p.check_hash = hr.block(128);
        p.eval_hash = hr.block(128);
      }
      hr.expect_done("key hashes");
      const Frame cf = cloud.expect(1, kSplitClaims);
      ByteReader cr(cf.payload);
      std::vector<cnc::CloudKeyClaim> claims(S);
      for (auto& c : claims) {
        c.hash = cr.block(128);
        c.check = cr.u8() != 0;
      }
      cr.expect_done("split claims");
      try {
        res.report.split = cnc::verify_split_hashes(pairs, claims);
      } catch (const cnc::SplitMismatchError& e) {
        abort_with(AbortKind::kCheatCloud, 1,
                   std::string(e.what()) + " (cloud claim and generator key hashes disagree)");
      }
    } else {
      res.report.split = cnc::CircuitSplit{Bits{0}};
    }

    const Bits pad = random_bits(prg, lay.evl_pad_bits);
    const Bits mac_key = random_bits(prg, lay.evl_mac_key_bits);
    const auto enc = ot::encode_input(params.input, lay.encoding_width, prg);
    const Bits choices = lay.evl_input(enc.shares, pad, mac_key);

    auto ext = extension_options(cfg);
    ext.corrupt_columns = params.tamper.is(Tamper::Kind::kOtColumns);
    ot::oot_evaluator(gen, cloud, 2, ext, choices, prg, res.report.ot);

    const Frame of = cloud.expect(6, kOutput);
    const Bits received = decode_bits(of.payload, C.evl_outputs.size(), 6);
    res.report.output =
        verify_output(received, pad, mac_key, lay.evl_output_data_bits, lay.evl_has_mac() ? lay.tag_bits : 0);
    exchange_status(gen, cloud);
  });
}

// ---------------------------------------------------------------------------
// Cloud.

PartyResult run_cloud(const ProtocolConfig& cfg, Link& gen, Link& evl, const PartyParams& params) {
  return guarded(Role::kCloud, cfg, gen, evl, [&](PartyResult& res) {
    check_config(cfg);
    exchange_hello(cfg, gen, evl);
    const unsigned K = cfg.label_bits;
    const std::uint32_t S = cfg.circuits;
    const std::uint64_t t = cfg.execution;
    const bool malicious = cfg.mode == Mode::kMalicious;
    const Tamper& tamper = params.tamper;
    const AugmentedCircuit aug = augment(cfg);
    const CircuitIR& C = aug.circuit;
    res.report.and_gates = C.and_count();
    check_prior(cfg, params.prior, Role::kCloud, C);
    Prg prg(params.seed);
    auto& stats = res.report.ot;
    const auto ext = extension_options(cfg);
    const std::uint32_t G = C.gen_input_count;
    const std::uint32_t E = C.evl_input_count;
    const std::uint32_t P = C.partial_input_count;

    // Phase 1.
    cnc::CircuitSplit split;
    std::vector<Block> selected;
    if (malicious) {
      if (t == 0) {
        split = cnc::select_split(S, prg);
        selected = cnc::cut_and_choose_ot_receive(gen, 1, ext, split, K, prg, stats);
      } else {
        split = params.prior->keys.split;
        selected = cnc::evolve_keys(params.prior->keys.selected, K);
      }
      ByteWriter w;
      for (std::uint32_t i = 0; i < S; ++i) {
        bool bit = split.is_check(i);
        if (tamper.is(Tamper::Kind::kSplitLie) && tamper.hits(i)) bit = !bit;
        w.block(cnc::hash_key(selected[i], i, K), 128);
        w.u8(bit ? 1 : 0);
      }
      evl.send(1, kSplitClaims, std::move(w).take());
    } else {
      split.selection = Bits{0};
    }
    res.report.split = split;

    std::vector<EvalPackage> eval_pkg(S);
    std::vector<CheckPackage> check_pkg(S);
    {
      const Frame pf = gen.expect(1, kPackages);
      ByteReader pr(pf.payload);
      for (std::uint32_t i = 0; i < S; ++i) {
        const Bytes eval_ct = pr.var_bytes();
        if (!malicious) {
          eval_pkg[i] = decode_eval(eval_ct, G, K);
          continue;
        }
        const Bytes check_ct = pr.var_bytes();
        try {
          if (split.is_check(i)) {
            check_pkg[i] = decode_check(
                cnc::seal_package(selected[i], i, t, cnc::kCheckPackage, check_ct), E, G, K);
          } else {
            eval_pkg[i] = decode_eval(
                cnc::seal_package(selected[i], i, t, cnc::kEvalPackage, eval_ct), G, K);
          }
        } catch (const FormatError& e) {
          abort_with(AbortKind::kCheatGenerator, 1,
                     "circuit " + std::to_string(i) + ": package does not decrypt: " + e.what());
        }
      }
      pr.expect_done("packages");
    }

    std::vector<std::array<ot::Commitment, 2>> commitments;
    if (malicious) {
      const Frame f = gen.expect(1, kCommitments);
      ByteReader r(f.payload);
      for (std::uint32_t i = 0; i < S; ++i) {
        for (std::uint32_t j = 0; j < E; ++j) {
          std::array<ot::Commitment, 2> pair;
          for (auto& c : pair) {
            const auto b = r.bytes(c.size());
            std::copy(b.begin(), b.end(), c.begin());
          }
          commitments.push_back(pair);
        }
      }
      r.expect_done("commitments");
      for (std::uint32_t i : split.check_circuits()) {
        const auto& cp = check_pkg[i];
        const Bits order = commitment_order(cp.cseed, i, E);
        for (std::uint32_t j = 0; j < E; ++j) {
          const auto& pair = commitments[std::size_t{i} * E + j];
          if (!ot::verify_opening(pair[order[j]], cp.evl_values[j].first,
                                  cp.evl_openings[j].first, i, j) ||
              !ot::verify_opening(pair[order[j] ^ 1], cp.evl_values[j].second,
                                  cp.evl_openings[j].second, i, j)) {
            abort_with(AbortKind::kCheatGenerator, 1,
                       "check circuit " + std::to_string(i) + ", evaluator input " +
                           std::to_string(j) + ": label commitment does not open");
          }
        }
      }
    }

    // Phase 2.
    const std::vector<Block> seeds = ot::oot_cloud(gen, evl, 2, E, K, stats);
    if (malicious) {
      for (std::uint32_t i : split.eval_circuits()) {
        for (std::uint32_t j = 0; j < E; ++j) {
          const Block v = ot::evl_input_value(eval_pkg[i].ikey, seeds[j], i, j, K);
          const Block o = ot::evl_input_opening(eval_pkg[i].ikey, seeds[j], i, j, K);
          const auto& pair = commitments[std::size_t{i} * E + j];
          if (!ot::verify_opening(pair[0], v, o, i, j) && !ot::verify_opening(pair[1], v, o, i, j)) {
            abort_with(AbortKind::kCheatGenerator, 2,
                       "evaluation circuit " + std::to_string(i) + ", evaluator input " +
                           std::to_string(j) + ": received seed matches no commitment");
          }
        }
      }
    }

    // Phase 3: generator input consistency.
    if (malicious) {
      const Block h = prg.next_block();
      std::optional<Block> first;
      for (std::uint32_t i : split.eval_circuits()) {
        const Block d = crypto::poly_uhf(h, eval_pkg[i].witness);
        if (!first) {
          first = d;
        } else if (d != *first) {
          abort_with(AbortKind::kCheatGenerator, 3,
                     "generator input differs in evaluation circuit " + std::to_string(i));
        }
      }
    }

    std::vector<std::optional<GarblingContext>> ctx(S);
    for (std::uint32_t i : split.check_circuits()) {
      ctx[i] = garbling::derive_context(check_pkg[i].cseed, i, C, K);
    }

    // Phase 4.
    std::vector<std::vector<Block>> partial_labels(S);
    if (P > 0) {
      const Frame f = gen.expect(4, malicious ? kPartialGates : kRemap);
      ByteReader r(f.payload);
      for (std::uint32_t i = 0; i < S; ++i) {
        const auto& saved = params.prior->wires[i];
        if (!malicious) {
          for (std::uint32_t j = 0; j < P; ++j) {
            const Block m0 = r.block(K);
            const Block m1 = r.block(K);
            partial_labels[i].push_back(partial::semi_honest_remap(saved[j].slot0, {m0, m1}));
          }
          continue;
        }
        const auto batch = partial::PartialGateBatch::decode(r, P, K);
        if (split.is_check(i)) {
          Pairs pouts;
          for (const auto& rec : saved) pouts.emplace_back(rec.slot0, rec.slot1);
          try {
            res.report.gates_compared += P;
            partial::check_partial_input_gates(pouts, *ctx[i], C, batch);
          } catch (const partial::PartialGateMismatch& e) {
            ++res.report.gate_mismatches;
            abort_with(AbortKind::kCheatGenerator, 4, e.what());
          }
        } else {
          std::vector<Block> x;
          for (const auto& rec : saved) x.push_back(rec.slot0);
          partial_labels[i] = partial::evaluate_partial_input_gates(batch, x, i, K);
        }
      }
      r.expect_done("partial input gates");
    }

    // Phase 5.
    const auto outs = output_wires(C);
    std::vector<Bits> evl_votes, gen_votes;
    std::vector<std::vector<Block>> labels(S);
    for (std::uint32_t i = 0; i < S; ++i) {
      const Frame f = gen.expect(5, kCircuit);
      Material m;
      try {
        m = decode_material(f.payload, C, K);
      } catch (const FormatError& e) {
        abort_with(AbortKind::kCheatGenerator, 5,
                   "circuit " + std::to_string(i) + ": malformed material: " + e.what());
      }
      if (malicious && split.is_check(i)) {
        const auto& cp = check_pkg[i];
        const Material expected = build_material(*ctx[i], C, cp.gen_hashes, cp.evl_values);
        if (auto bad = compare_material(expected, m, res.report.gates_compared,
                                        res.report.gate_mismatches)) {
          abort_with(AbortKind::kCheatGenerator, 5,
                     "check circuit " + std::to_string(i) + ": " + *bad +
                         " differs from the regenerated circuit");
        }
        continue;
      }
      const auto& ep = eval_pkg[i];
      std::vector<Block> in(C.input_count());
      bool valid = true;
      try {
        for (std::uint32_t j = 0; j < G; ++j) {
          in[C.gen_input(j)] = partial::eval_input_gate(
              m.gen_gates[j], partial::gen_input_hash(ep.ikey, ep.witness[j], i, j, K));
        }
        for (std::uint32_t j = 0; j < E; ++j) {
          in[C.evl_input(j)] = partial::eval_input_gate(
              m.evl_gates[j], ot::evl_input_value(ep.ikey, seeds[j], i, j, K));
        }
        for (std::uint32_t j = 0; j < P; ++j) in[C.partial_input(j)] = partial_labels[i][j];
        labels[i] = garbling::evaluate_circuit(C, m.and_gates, in, i, K);
      } catch (const garbling::CorruptGateError&) {
        valid = false;
      }
      Bits ev, gv;
      for (std::size_t o = 0; valid && o < outs.size(); ++o) {
        const auto bit = garbling::decode_output(m.decode[o], labels[i][outs[o]], i, outs[o]);
        if (!bit) {
          valid = false;
          break;
        }
        (o < C.evl_outputs.size() ? ev : gv).push_back(*bit ? 1 : 0);
      }
      if (!valid) {
        ++res.report.invalid_eval_circuits;
        continue;
      }
      evl_votes.push_back(std::move(ev));
      gen_votes.push_back(std::move(gv));
    }

    // Phase 6: vote and deliver.
    auto evl_out = majority_vote(evl_votes);
    auto gen_out = majority_vote(gen_votes);
    if (!evl_out || !gen_out) {
      abort_with(AbortKind::kUnreliableOutput, 6,
                 evl_votes.empty() ? "no evaluation circuit produced a valid output"
                                   : "evaluation circuits are evenly split on an output bit");
    }
    if (tamper.is(Tamper::Kind::kOutputFlip)) {
      Bits& target = !evl_out->empty() ? *evl_out : *gen_out;
      if (!target.empty()) target[tamper.index % target.size()] ^= 1;
    }
    gen.send(6, kOutput, encode_bits(*gen_out));
    evl.send(6, kOutput, encode_bits(*evl_out));
    gen.expect(6, kStatus);
    evl.expect(6, kStatus);

    // Phase 7.
    state::SavedState next;
    next.role = Role::kCloud;
    next.mode = cfg.mode;
    next.next_execution = t + 1;
    next.circuits = S;
    next.label_bits = K;
    next.keys.role = Role::kCloud;
    next.keys.split = split;
    next.keys.selected = selected;
    for (std::uint32_t i = 0; i < S; ++i) {
      const bool check = malicious && split.is_check(i);
      if (check) {
        next.wires.push_back(partial::save_partial_outputs(&*ctx[i], C, true, nullptr));
      } else if (labels[i].size() == C.wire_count()) {
        next.wires.push_back(partial::save_partial_outputs(nullptr, C, false, &labels[i]));
      } else {
        // Invalid evaluation circuit: nothing usable to carry forward.
        std::vector<partial::SavedWireRecord> blank(C.saved_wires.size());
        for (auto& rec : blank) rec.flags = partial::SavedWireRecord::kHasX;
        next.wires.push_back(std::move(blank));
      }
    }
    res.next_state = std::move(next);
  });
}

// ---------------------------------------------------------------------------

std::optional<AbortInfo> ExecutionResult::abort() const {
  for (const PartyResult* p : {&gen, &evl, &cloud}) {
    if (p->report.abort && !p->report.abort->remote) return p->report.abort;
  }
  for (const PartyResult* p : {&gen, &evl, &cloud}) {
    if (p->report.abort) return p->report.abort;
  }
  return std::nullopt;
}

bool ExecutionResult::cheating_detected() const {
  const auto a = abort();
  return a && transport::is_cheating(a->kind);
}

ExecutionResult run_local(const ProtocolConfig& cfg, const Bits& gen_input, const Bits& evl_input,
                          std::optional<state::SavedState> gen_prior,
                          std::optional<state::SavedState> cloud_prior,
                          const LocalRunOptions& opt) {
  auto [ge_g, ge_e] = transport::make_pipe();
  auto [gc_g, gc_c] = transport::make_pipe();
  auto [ec_e, ec_c] = transport::make_pipe();
  Link g_evl(std::move(ge_g), "evaluator"), g_cloud(std::move(gc_g), "cloud");
  Link e_gen(std::move(ge_e), "generator"), e_cloud(std::move(ec_e), "cloud");
  Link c_gen(std::move(gc_c), "generator"), c_evl(std::move(ec_c), "evaluator");
  if (opt.transcript_dir) {
    std::filesystem::create_directories(*opt.transcript_dir);
    const auto& d = *opt.transcript_dir;
    g_evl.record_transcript(d / "gen-to-evl.bin");
    g_cloud.record_transcript(d / "gen-to-cloud.bin");
    e_gen.record_transcript(d / "evl-to-gen.bin");
    e_cloud.record_transcript(d / "evl-to-cloud.bin");
    c_gen.record_transcript(d / "cloud-to-gen.bin");
    c_evl.record_transcript(d / "cloud-to-evl.bin");
  }
  ExecutionResult out;
  PartyParams gp{gen_input, std::move(gen_prior), opt.gen_seed, opt.tamper};
  PartyParams ep{evl_input, std::nullopt, opt.evl_seed, opt.tamper};
  PartyParams cp{{}, std::move(cloud_prior), opt.cloud_seed, opt.tamper};
  std::thread tg([&] { out.gen = run_generator(cfg, g_evl, g_cloud, gp); });
  std::thread te([&] { out.evl = run_evaluator(cfg, e_gen, e_cloud, ep); });
  out.cloud = run_cloud(cfg, c_gen, c_evl, cp);
  tg.join();
  te.join();
  return out;
}

LocalChain::LocalChain(ChainOptions opt) : opt_(std::move(opt)) {}

Block LocalChain::party_seed(Role r) const {
  if (!opt_.seed) return crypto::os_random_block();
  Prg prg(*opt_.seed, crypto::make_tweak(crypto::Domain::kContext, static_cast<std::uint32_t>(r),
                                         nonce_));
  return prg.next_block();
}

void LocalChain::set_states(std::optional<state::SavedState> gen,
                            std::optional<state::SavedState> cloud, std::uint64_t next) {
  gen_state_ = std::move(gen);
  cloud_state_ = std::move(cloud);
  next_ = next;
}

ExecutionResult LocalChain::run(const CircuitIR& c, const Bits& gen_input, const Bits& evl_input,
                                const Tamper& tamper) {
  ProtocolConfig cfg;
  cfg.circuit = c;
  cfg.circuits = opt_.circuits;
  cfg.label_bits = opt_.label_bits;
  cfg.encoding_width = opt_.encoding_width;
  cfg.tag_bits = opt_.tag_bits;
  cfg.mode = opt_.mode;
  cfg.base_ot = opt_.base_ot;
  cfg.execution = next_;
  LocalRunOptions lo;
  lo.gen_seed = party_seed(Role::kGenerator);
  lo.evl_seed = party_seed(Role::kEvaluator);
  lo.cloud_seed = party_seed(Role::kCloud);
  ++nonce_;
  lo.tamper = tamper;
  if (opt_.transcript_dir) lo.transcript_dir = *opt_.transcript_dir / ("t" + std::to_string(next_));
  ExecutionResult r = run_local(cfg, gen_input, evl_input, gen_state_, cloud_state_, lo);
  if (r.ok()) {
    gen_state_ = r.gen.next_state;
    cloud_state_ = r.cloud.next_state;
    ++next_;
  } else if (r.cheating_detected()) {
    if (gen_state_) gen_state_->poisoned = true;
    if (cloud_state_) cloud_state_->poisoned = true;
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct TamperName {
  Tamper::Kind kind;
  const char* name;
};

constexpr TamperName kTamperNames[] = {
    {Tamper::Kind::kNone, "none"},
    {Tamper::Kind::kGateRow, "gate-row"},
    {Tamper::Kind::kPartialRow, "partial-row"},
    {Tamper::Kind::kTransform, "transform"},
    {Tamper::Kind::kWitness, "witness"},
    {Tamper::Kind::kEvlSwap, "evl-swap"},
    {Tamper::Kind::kWrongFunction, "wrong-function"},
    {Tamper::Kind::kKeyHashSwap, "key-hash-swap"},
    {Tamper::Kind::kSplitLie, "split-lie"},
    {Tamper::Kind::kOutputFlip, "output-flip"},
    {Tamper::Kind::kOtColumns, "ot-columns"},
};

}  // namespace

Tamper Tamper::parse(const std::string& text) {
  Tamper t;
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string::npos ? colon : colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  bool found = false;
  for (const auto& n : kTamperNames) {
    if (parts[0] == n.name) {
      t.kind = n.kind;
      found = true;
    }
  }
  if (!found) throw Error("unknown tamper kind '" + parts[0] + "'");
  try {
    if (parts.size() > 1) t.circuit = parts[1] == "all" ? -1 : std::stoi(parts[1]);
    if (parts.size() > 2) t.index = static_cast<std::uint32_t>(std::stoul(parts[2]));
  } catch (const std::logic_error&) {
    throw Error("bad tamper spec '" + text + "'");
  }
  if (parts.size() > 3) throw Error("bad tamper spec '" + text + "'");
  return t;
}

std::string Tamper::to_string() const {
  std::string s = "none";
  for (const auto& n : kTamperNames) {
    if (n.kind == kind) s = n.name;
  }
  if (kind == Kind::kNone) return s;
  return s + ":" + (circuit < 0 ? std::string("all") : std::to_string(circuit)) + ":" +
         std::to_string(index);
}

}  // namespace pgc::protocol
