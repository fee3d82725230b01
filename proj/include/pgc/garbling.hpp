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
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pgc/circuit.hpp"
#include "pgc/common.hpp"

namespace pgc::garbling {

using circuit::CircuitIR;
using circuit::Gate;
using circuit::WireId;

/// Width of the zero validity pad appended to each row plaintext.
inline constexpr unsigned kPadBits = 8;
inline constexpr unsigned kMinLabelBits = 8;
inline constexpr unsigned kMaxLabelBits = 128 - kPadBits;

void check_label_bits(unsigned k);

inline bool pp_bit(const Block& label) { return label.bit(0); }

/// Labels of one circuit instance. label1 = label0 ^ delta for every wire.
struct GarblingContext {
  std::uint32_t circuit_index = 0;
  unsigned label_bits = 80;
  Block seed;
  Block delta;
  std::vector<Block> label0;  // indexed by wire id

  Block label(WireId w, bool value) const { return value ? label0[w] ^ delta : label0[w]; }
};

class FreeXorError : public Error {
 public:
  using Error::Error;
};

class CorruptGateError : public Error {
 public:
  CorruptGateError(std::uint32_t gate_id, const std::string& what)
      : Error(what), gate_id_(gate_id) {}
  std::uint32_t gate_id() const { return gate_id_; }

 private:
  std::uint32_t gate_id_;
};

using InjectedLabels = std::map<WireId, std::pair<Block, Block>>;

/// Derives delta and every label from the seed. Injected input-wire pairs
/// replace the derived ones and must differ by delta.
GarblingContext derive_context(const Block& seed, std::uint32_t circuit_index,
                               const CircuitIR& c, unsigned label_bits,
                               const InjectedLabels& injected = {});

struct GarbledGate {
  std::uint32_t gate_id = 0;
  std::vector<Block> rows;  // K+8 significant bits each

  bool operator==(const GarbledGate&) const = default;

  void encode(ByteWriter& w, unsigned label_bits) const;
  static GarbledGate decode(ByteReader& r, unsigned label_bits);
};

inline std::size_t row_bytes(unsigned label_bits) { return bytes_for_bits(label_bits + kPadBits); }

/// XOR and NOT gates produce no rows; AND gates produce four, indexed by
/// 2*pp(x) + pp(y).
GarbledGate garble_gate(const GarblingContext& ctx, const Gate& g);

/// Output label of `g`. Throws CorruptGateError when the selected row's
/// validity pad is nonzero or the row is missing.
/// NOT passes the label through unchanged since the generator folds delta
/// into the output labels.
Block evaluate_gate(const GarbledGate& gg, const Gate& g, const Block& x, const Block& y,
                    std::uint32_t circuit_index, unsigned label_bits);

bool verify_gate(const GarbledGate& expected, const GarbledGate& received);

/// Rows for every AND gate of `c`, in gate order.
std::vector<GarbledGate> garble_circuit(const GarblingContext& ctx, const CircuitIR& c);

/// Evaluates the whole circuit. `inputs` holds one label per input wire.
std::vector<Block> evaluate_circuit(const CircuitIR& c, const std::vector<GarbledGate>& and_gates,
                                    const std::vector<Block>& inputs,
                                    std::uint32_t circuit_index, unsigned label_bits);

/// Per-output-wire decoding data: lambda = pp(label0) and a short hash of
/// each label placed at its pp position.
struct DecodeEntry {
  bool lambda = false;
  std::uint64_t hash[2] = {0, 0};

  bool operator==(const DecodeEntry& o) const {
    return lambda == o.lambda && hash[0] == o.hash[0] && hash[1] == o.hash[1];
  }
};

std::uint64_t output_label_hash(const Block& label, std::uint32_t circuit_index, WireId w);

std::vector<DecodeEntry> make_decode_table(const GarblingContext& ctx,
                                           const std::vector<WireId>& wires);
/// Bit carried by `label`, or nullopt when the label is neither valid label.
std::optional<bool> decode_output(const DecodeEntry& e, const Block& label,
                                  std::uint32_t circuit_index, WireId w);

void encode_decode_table(ByteWriter& w, const std::vector<DecodeEntry>& t);
std::vector<DecodeEntry> decode_decode_table(ByteReader& r, std::size_t count);

}  // namespace pgc::garbling
