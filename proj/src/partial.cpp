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

#include "pgc/partial.hpp"

#include <numeric>

#include "pgc/crypto.hpp"

namespace pgc::partial {

using crypto::Domain;
using garbling::pp_bit;

PpBit set_pp_bit_gen(const Block& t0, const Block& t1, const Block& cseed, GateDomain domain,
                     std::uint32_t j, unsigned label_bits) {
  if (t0 == t1) {
    throw HashCollisionError("input gate " + std::to_string(j) +
                             ": both hash values are equal, no permutation bit exists");
  }
  crypto::Prg prg(cseed, crypto::make_tweak(Domain::kPpLocation, static_cast<std::uint32_t>(domain), j));
  std::vector<unsigned> perm(label_bits);
  std::iota(perm.begin(), perm.end(), 0U);
  for (unsigned idx = 0; idx < label_bits; ++idx) {
    std::swap(perm[idx], perm[idx + prg.uniform(label_bits - idx)]);
    if (t0.bit(perm[idx]) != t1.bit(perm[idx])) {
      return {t0, t1, static_cast<std::uint8_t>(perm[idx])};
    }
  }
  throw HashCollisionError("input gate " + std::to_string(j) + ": values agree on all K bits");
}

void InputGate::encode(ByteWriter& w, unsigned label_bits) const {
  w.u8(location);
  w.block(rows[0], label_bits);
  w.block(rows[1], label_bits);
}

InputGate InputGate::decode(ByteReader& r, unsigned label_bits) {
  InputGate g;
  g.location = r.u8();
  if (g.location >= label_bits) throw FormatError("input gate: pp location out of range");
  g.rows[0] = r.block(label_bits);
  g.rows[1] = r.block(label_bits);
  return g;
}

InputGate make_input_gate(const Block& t0, const Block& t1, const Block& g0, const Block& g1,
                          const Block& cseed, GateDomain domain, std::uint32_t j,
                          unsigned label_bits) {
  const PpBit pp = set_pp_bit_gen(t0, t1, cseed, domain, j, label_bits);
  InputGate g;
  g.location = pp.location;
  const bool p0 = pp.pin0.bit(pp.location);
  g.rows[p0 ? 1 : 0] = g0 ^ pp.pin0;
  g.rows[p0 ? 0 : 1] = g1 ^ pp.pin1;
  return g;
}

Block eval_input_gate(const InputGate& g, const Block& t) {
  return g.rows[t.bit(g.location) ? 1 : 0] ^ t;
}

Block partial_hash(const Block& pout, const Block& r, std::uint32_t circuit, std::uint32_t j,
                   unsigned label_bits) {
  return crypto::tweak_hash(pout ^ r, Block{}, crypto::make_tweak(Domain::kPartial, circuit, j))
      .truncated(label_bits);
}

Block gen_input_hash(const Block& ikey, const Block& witness, std::uint32_t circuit,
                     std::uint32_t j, unsigned label_bits) {
  return crypto::tweak_hash(ikey, witness, crypto::make_tweak(Domain::kGenInput, circuit, j))
      .truncated(label_bits);
}

Block derive_transform(const Block& cseed, std::uint32_t circuit, unsigned label_bits) {
  crypto::Prg prg(cseed, crypto::make_tweak(Domain::kPartial, circuit, ~std::uint64_t{0}));
  return prg.label(label_bits);
}

void PartialGateBatch::encode(ByteWriter& w, unsigned label_bits) const {
  w.block(r, label_bits);
  for (const auto& g : gates) g.encode(w, label_bits);
}

PartialGateBatch PartialGateBatch::decode(ByteReader& rd, std::size_t count, unsigned label_bits) {
  PartialGateBatch b;
  b.r = rd.block(label_bits);
  for (std::size_t j = 0; j < count; ++j) b.gates.push_back(InputGate::decode(rd, label_bits));
  return b;
}

PartialGateBatch generate_partial_input_gates(const std::vector<std::pair<Block, Block>>& pouts,
                                              const garbling::GarblingContext& ctx,
                                              const circuit::CircuitIR& c, const Block& r) {
  if (pouts.size() != c.partial_input_count) {
    throw Error("partial input gates: " + std::to_string(pouts.size()) +
                " saved wires for " + std::to_string(c.partial_input_count) + " partial inputs");
  }
  PartialGateBatch b;
  b.r = r;
  const unsigned k = ctx.label_bits;
  for (std::uint32_t j = 0; j < pouts.size(); ++j) {
    const Block t0 = partial_hash(pouts[j].first, r, ctx.circuit_index, j, k);
    const Block t1 = partial_hash(pouts[j].second, r, ctx.circuit_index, j, k);
    const auto w = c.partial_input(j);
    b.gates.push_back(make_input_gate(t0, t1, ctx.label(w, false), ctx.label(w, true), ctx.seed,
                                      GateDomain::kPartial, j, k));
  }
  return b;
}

void check_partial_input_gates(const std::vector<std::pair<Block, Block>>& pouts,
                               const garbling::GarblingContext& ctx,
                               const circuit::CircuitIR& c, const PartialGateBatch& received) {
  const std::uint32_t i = ctx.circuit_index;
  const Block r = derive_transform(ctx.seed, i, ctx.label_bits);
  if (received.r != r) {
    throw PartialGateMismatch(i, 0, "circuit " + std::to_string(i) +
                                        ": transformation value does not match the seed");
  }
  if (received.gates.size() != pouts.size()) {
    throw PartialGateMismatch(i, 0, "circuit " + std::to_string(i) + ": partial gate count");
  }
  const auto expected = generate_partial_input_gates(pouts, ctx, c, r);
  for (std::uint32_t j = 0; j < pouts.size(); ++j) {
    if (!(expected.gates[j] == received.gates[j])) {
      throw PartialGateMismatch(i, j, "circuit " + std::to_string(i) + ", saved wire " +
                                          std::to_string(j) + ": partial input gate mismatch");
    }
  }
}

std::vector<Block> evaluate_partial_input_gates(const PartialGateBatch& batch,
                                                const std::vector<Block>& pout_x,
                                                std::uint32_t circuit, unsigned label_bits) {
  if (batch.gates.size() != pout_x.size()) throw Error("partial input gates: count mismatch");
  std::vector<Block> out;
  for (std::uint32_t j = 0; j < pout_x.size(); ++j) {
    out.push_back(eval_input_gate(batch.gates[j],
                                  partial_hash(pout_x[j], batch.r, circuit, j, label_bits)));
  }
  return out;
}

std::pair<Block, Block> semi_honest_messages(const Block& prev0, const Block& prev1,
                                             const Block& new0, const Block& new1) {
  if (pp_bit(prev0) == pp_bit(prev1)) throw Error("semi-honest remap: saved labels share a pp bit");
  Block m[2];
  m[pp_bit(prev0) ? 1 : 0] = prev0 ^ new0;
  m[pp_bit(prev1) ? 1 : 0] = prev1 ^ new1;
  return {m[0], m[1]};
}

Block semi_honest_remap(const Block& w_prev, const std::pair<Block, Block>& msgs) {
  return w_prev ^ (pp_bit(w_prev) ? msgs.second : msgs.first);
}

std::vector<SavedWireRecord> save_partial_outputs(const garbling::GarblingContext* ctx,
                                                  const circuit::CircuitIR& c, bool both,
                                                  const std::vector<Block>* evaluated) {
  std::vector<SavedWireRecord> out;
  for (std::size_t j = 0; j < c.saved_wires.size(); ++j) {
    const auto w = c.saved_wires[j];
    SavedWireRecord rec;
    if (both) {
      if (ctx == nullptr) throw Error("save: both labels requested without a context");
      rec.flags = SavedWireRecord::kHas0 | SavedWireRecord::kHas1;
      rec.slot0 = ctx->label(w, false);
      rec.slot1 = ctx->label(w, true);
    } else {
      if (evaluated == nullptr || evaluated->size() <= w) {
        throw Error("save: missing evaluated label for saved wire " + std::to_string(j));
      }
      rec.flags = SavedWireRecord::kHasX;
      rec.slot0 = (*evaluated)[w];
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace pgc::partial
