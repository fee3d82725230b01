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

#include "pgc/garbling.hpp"

#include "pgc/crypto.hpp"

namespace pgc::garbling {

using circuit::Op;
using crypto::Domain;

void check_label_bits(unsigned k) {
  if (k < kMinLabelBits || k > kMaxLabelBits) {
    throw Error("label width must be between " + std::to_string(kMinLabelBits) + " and " +
                std::to_string(kMaxLabelBits) + " bits");
  }
}

GarblingContext derive_context(const Block& seed, std::uint32_t circuit_index,
                               const CircuitIR& c, unsigned label_bits,
                               const InjectedLabels& injected) {
  check_label_bits(label_bits);
  GarblingContext ctx;
  ctx.circuit_index = circuit_index;
  ctx.label_bits = label_bits;
  ctx.seed = seed;
  crypto::Prg prg(seed, crypto::make_tweak(Domain::kContext, circuit_index, 0));
  ctx.delta = prg.label(label_bits);
  ctx.delta.set_bit(0, true);
  ctx.label0.resize(c.wire_count());
  for (WireId w = 0; w < c.input_count(); ++w) {
    // Always draw so derived labels do not depend on which wires are injected.
    ctx.label0[w] = prg.label(label_bits);
    auto it = injected.find(w);
    if (it == injected.end()) continue;
    const auto& [l0, l1] = it->second;
    if ((l0 ^ l1) != ctx.delta) {
      throw FreeXorError("injected labels for wire " + std::to_string(w) +
                         " do not differ by the circuit offset");
    }
    ctx.label0[w] = l0;
  }
  for (const Gate& g : c.gates) {
    switch (g.op) {
      case Op::kXor:
        ctx.label0[g.id] = ctx.label0[g.in0] ^ ctx.label0[g.in1];
        break;
      case Op::kNot:
        ctx.label0[g.id] = ctx.label0[g.in0] ^ ctx.delta;
        break;
      case Op::kAnd:
        ctx.label0[g.id] = prg.label(label_bits);
        break;
      case Op::kOr:
        throw Error("derive_context: OR gates must be lowered first");
    }
  }
  return ctx;
}

void GarbledGate::encode(ByteWriter& w, unsigned label_bits) const {
  w.u32(gate_id);
  w.u8(static_cast<std::uint8_t>(rows.size()));
  for (const Block& r : rows) w.block(r, label_bits + kPadBits);
}

GarbledGate GarbledGate::decode(ByteReader& r, unsigned label_bits) {
  GarbledGate g;
  g.gate_id = r.u32();
  const unsigned n = r.u8();
  if (n != 0 && n != 2 && n != 4) throw FormatError("garbled gate: bad row count");
  for (unsigned i = 0; i < n; ++i) g.rows.push_back(r.block(label_bits + kPadBits));
  return g;
}

namespace {

Block row_key(const Block& x, const Block& y, std::uint32_t circuit_index, std::uint32_t gate_id,
              unsigned label_bits) {
  return crypto::tweak_hash(x, y, crypto::make_tweak(Domain::kGateRow, circuit_index, gate_id))
      .truncated(label_bits + kPadBits);
}

}  // namespace

GarbledGate garble_gate(const GarblingContext& ctx, const Gate& g) {
  GarbledGate gg;
  gg.gate_id = g.id;
  if (g.op != Op::kAnd) return gg;
  gg.rows.resize(4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Block x = ctx.label(g.in0, a != 0);
      const Block y = ctx.label(g.in1, b != 0);
      const Block out = ctx.label(g.id, (a & b) != 0);
      const unsigned idx = 2U * pp_bit(x) + pp_bit(y);
      gg.rows[idx] = row_key(x, y, ctx.circuit_index, g.id, ctx.label_bits) ^ out;
    }
  }
  return gg;
}

Block evaluate_gate(const GarbledGate& gg, const Gate& g, const Block& x, const Block& y,
                    std::uint32_t circuit_index, unsigned label_bits) {
  switch (g.op) {
    case Op::kXor:
      return x ^ y;
    case Op::kNot:
      return x;
    case Op::kOr:
      throw Error("evaluate_gate: OR gates must be lowered first");
    case Op::kAnd:
      break;
  }
  if (gg.rows.size() != 4 || gg.gate_id != g.id) {
    throw CorruptGateError(g.id, "gate " + std::to_string(g.id) + ": missing rows");
  }
  const unsigned idx = 2U * pp_bit(x) + pp_bit(y);
  const Block plain = gg.rows[idx] ^ row_key(x, y, circuit_index, g.id, label_bits);
  if (plain.truncated(label_bits) != plain) {
    throw CorruptGateError(g.id, "gate " + std::to_string(g.id) + ": validity pad mismatch");
  }
  return plain;
}

bool verify_gate(const GarbledGate& expected, const GarbledGate& received) {
  return expected == received;
}

std::vector<GarbledGate> garble_circuit(const GarblingContext& ctx, const CircuitIR& c) {
  std::vector<GarbledGate> out;
  out.reserve(c.and_count());
  for (const Gate& g : c.gates) {
    if (g.op == Op::kAnd) out.push_back(garble_gate(ctx, g));
  }
  return out;
}

std::vector<Block> evaluate_circuit(const CircuitIR& c, const std::vector<GarbledGate>& and_gates,
                                    const std::vector<Block>& inputs,
                                    std::uint32_t circuit_index, unsigned label_bits) {
  if (inputs.size() != c.input_count()) throw Error("evaluate_circuit: input label count");
  std::vector<Block> v(c.wire_count());
  std::copy(inputs.begin(), inputs.end(), v.begin());
  std::size_t next = 0;
  static const GarbledGate kNone;
  for (const Gate& g : c.gates) {
    const GarbledGate* gg = &kNone;
    if (g.op == Op::kAnd) {
      if (next >= and_gates.size()) throw CorruptGateError(g.id, "garbled gate stream too short");
      gg = &and_gates[next++];
    }
    v[g.id] = evaluate_gate(*gg, g, v[g.in0], v[g.in1], circuit_index, label_bits);
  }
  return v;
}

std::uint64_t output_label_hash(const Block& label, std::uint32_t circuit_index, WireId w) {
  return crypto::tweak_hash(label, Block{}, crypto::make_tweak(Domain::kOutputDecode, circuit_index, w))
      .lo;
}

std::vector<DecodeEntry> make_decode_table(const GarblingContext& ctx,
                                           const std::vector<WireId>& wires) {
  std::vector<DecodeEntry> out;
  for (WireId w : wires) {
    DecodeEntry e;
    const Block l0 = ctx.label(w, false);
    e.lambda = pp_bit(l0);
    e.hash[e.lambda ? 1 : 0] = output_label_hash(l0, ctx.circuit_index, w);
    e.hash[e.lambda ? 0 : 1] = output_label_hash(ctx.label(w, true), ctx.circuit_index, w);
    out.push_back(e);
  }
  return out;
}

std::optional<bool> decode_output(const DecodeEntry& e, const Block& label,
                                  std::uint32_t circuit_index, WireId w) {
  const bool pp = pp_bit(label);
  if (e.hash[pp ? 1 : 0] != output_label_hash(label, circuit_index, w)) return std::nullopt;
  return pp != e.lambda;
}

void encode_decode_table(ByteWriter& w, const std::vector<DecodeEntry>& t) {
  Bits lambdas;
  for (const auto& e : t) lambdas.push_back(e.lambda ? 1 : 0);
  w.bits(lambdas);
  for (const auto& e : t) {
    w.u64(e.hash[0]);
    w.u64(e.hash[1]);
  }
}

std::vector<DecodeEntry> decode_decode_table(ByteReader& r, std::size_t count) {
  const Bits lambdas = r.bits(count);
  std::vector<DecodeEntry> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].lambda = lambdas[i] != 0;
    out[i].hash[0] = r.u64();
    out[i].hash[1] = r.u64();
  }
  return out;
}

}  // namespace pgc::garbling
