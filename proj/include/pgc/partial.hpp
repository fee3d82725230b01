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

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pgc/circuit.hpp"
#include "pgc/common.hpp"
#include "pgc/garbling.hpp"

namespace pgc::partial {

/// What a one-wire input gate maps onto circuit labels.
enum class GateDomain : std::uint8_t { kPartial = 0, kGenInput = 1, kEvlInput = 2 };

class HashCollisionError : public Error {
 public:
  using Error::Error;
};

struct PpBit {
  Block pin0;
  Block pin1;
  std::uint8_t location = 0;
};

/// Walks a permutation of 0..K-1 drawn from (cseed, domain, j) and takes the
/// first position where t0 and t1 differ as the permutation bit.
PpBit set_pp_bit_gen(const Block& t0, const Block& t1, const Block& cseed, GateDomain domain,
                     std::uint32_t j, unsigned label_bits);

/// Two rows TT_b = GIn_b ^ PIn_b stored at index pp(PIn_b), plus the pp location.
struct InputGate {
  std::uint8_t location = 0;
  Block rows[2];

  bool operator==(const InputGate& o) const {
    return location == o.location && rows[0] == o.rows[0] && rows[1] == o.rows[1];
  }
  void encode(ByteWriter& w, unsigned label_bits) const;
  static InputGate decode(ByteReader& r, unsigned label_bits);
};

InputGate make_input_gate(const Block& t0, const Block& t1, const Block& g0, const Block& g1,
                          const Block& cseed, GateDomain domain, std::uint32_t j,
                          unsigned label_bits);
/// GIn_x = TT[pp(PIn_x)] ^ PIn_x.
Block eval_input_gate(const InputGate& g, const Block& t);

/// t_b = H(POut_b ^ R_i), tweaked by (i, j, partial).
Block partial_hash(const Block& pout, const Block& r, std::uint32_t circuit, std::uint32_t j,
                   unsigned label_bits);
/// Generator-input hash H(IKey_i, w_j).
Block gen_input_hash(const Block& ikey, const Block& witness, std::uint32_t circuit,
                     std::uint32_t j, unsigned label_bits);
/// R_i, derived from the circuit seed so check circuits can regenerate it.
Block derive_transform(const Block& cseed, std::uint32_t circuit, unsigned label_bits);

struct PartialGateBatch {
  Block r;
  std::vector<InputGate> gates;

  bool operator==(const PartialGateBatch&) const = default;
  void encode(ByteWriter& w, unsigned label_bits) const;
  static PartialGateBatch decode(ByteReader& r, std::size_t count, unsigned label_bits);
};

/// Generator: one gate per saved wire mapping (pout0, pout1) onto the new
/// circuit's partial-input labels.
PartialGateBatch generate_partial_input_gates(const std::vector<std::pair<Block, Block>>& pouts,
                                              const garbling::GarblingContext& ctx,
                                              const circuit::CircuitIR& c, const Block& r);

class PartialGateMismatch : public Error {
 public:
  PartialGateMismatch(std::uint32_t circuit, std::uint32_t wire, const std::string& what)
      : Error(what), circuit_(circuit), wire_(wire) {}
  std::uint32_t circuit() const { return circuit_; }
  std::uint32_t wire() const { return wire_; }

 private:
  std::uint32_t circuit_;
  std::uint32_t wire_;
};

/// Cloud, check circuits: regenerates the batch and requires byte equality.
void check_partial_input_gates(const std::vector<std::pair<Block, Block>>& pouts,
                               const garbling::GarblingContext& ctx,
                               const circuit::CircuitIR& c, const PartialGateBatch& received);

/// Cloud, evaluation circuits: GIn_x for every saved wire.
std::vector<Block> evaluate_partial_input_gates(const PartialGateBatch& batch,
                                                const std::vector<Block>& pout_x,
                                                std::uint32_t circuit, unsigned label_bits);

/// Two-message remap for the semi-honest mode: msg[pp(w_b_prev)] = w_b_prev ^ w_b_new.
std::pair<Block, Block> semi_honest_messages(const Block& prev0, const Block& prev1,
                                             const Block& new0, const Block& new1);
Block semi_honest_remap(const Block& w_prev, const std::pair<Block, Block>& msgs);

/// Saved label record. Flags: has0, has1, hasX (single evaluated label in slot 0).
struct SavedWireRecord {
  static constexpr std::uint8_t kHas0 = 0x01;
  static constexpr std::uint8_t kHas1 = 0x02;
  static constexpr std::uint8_t kHasX = 0x04;

  std::uint8_t flags = 0;
  Block slot0;
  Block slot1;

  bool operator==(const SavedWireRecord&) const = default;
  bool has_both() const { return (flags & (kHas0 | kHas1)) == (kHas0 | kHas1); }
  bool has_x() const { return (flags & kHasX) != 0; }
};

/// Phase 7. Both labels when `both` (generator, or cloud on a check
/// circuit); otherwise the evaluated labels, which must be supplied.
std::vector<SavedWireRecord> save_partial_outputs(const garbling::GarblingContext* ctx,
                                                  const circuit::CircuitIR& c, bool both,
                                                  const std::vector<Block>* evaluated);

}  // namespace pgc::partial
