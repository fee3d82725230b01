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
#include <string>
#include <string_view>
#include <vector>

#include "pgc/common.hpp"

namespace pgc::circuit {

using WireId = std::uint32_t;

enum class Op : std::uint8_t { kAnd, kXor, kOr, kNot };

std::string_view op_name(Op op);

struct Gate {
  WireId id = 0;  // wire this gate defines
  Op op = Op::kAnd;
  WireId in0 = 0;
  WireId in1 = 0;  // unused for NOT

  bool operator==(const Gate&) const = default;
  unsigned arity() const { return op == Op::kNot ? 1 : 2; }
};

/// Boolean circuit with wires 0..wire_count()-1. Inputs come first, in the
/// order generator, evaluator, partial; gates follow in topological order.
/// OR gates never survive parsing or building.
struct CircuitIR {
  std::uint32_t gen_input_count = 0;
  std::uint32_t evl_input_count = 0;
  std::uint32_t partial_input_count = 0;
  std::vector<Gate> gates;
  std::vector<WireId> evl_outputs;
  std::vector<WireId> gen_outputs;
  std::vector<WireId> saved_wires;

  bool operator==(const CircuitIR&) const = default;

  std::uint32_t input_count() const {
    return gen_input_count + evl_input_count + partial_input_count;
  }
  std::uint32_t wire_count() const {
    return input_count() + static_cast<std::uint32_t>(gates.size());
  }
  WireId gen_input(std::uint32_t i) const { return i; }
  WireId evl_input(std::uint32_t i) const { return gen_input_count + i; }
  WireId partial_input(std::uint32_t i) const { return gen_input_count + evl_input_count + i; }

  std::size_t and_count() const;
};

/// Error carrying a 1-based source position (0 when not applicable).
class ParseError : public FormatError {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Parses the line-oriented circuit format, validates it and lowers OR gates.
CircuitIR parse_circuit(std::string_view text);
std::string emit_circuit(const CircuitIR& c);

/// Checks topological order, dense ids and output/saved references.
void validate(const CircuitIR& c);

/// Replaces OR(a,b) with XOR(XOR(a,b), AND(a,b)); intermediates get fresh ids.
CircuitIR lower_or_gates(const CircuitIR& c);

struct PlainOutputs {
  Bits evl;
  Bits gen;
  Bits saved;
};

PlainOutputs simulate_plaintext(const CircuitIR& c, std::span<const std::uint8_t> gen_bits,
                                std::span<const std::uint8_t> evl_bits,
                                std::span<const std::uint8_t> partial_bits);

/// Per-wire plaintext values (all wires), for tests that need internal wires.
Bits simulate_wires(const CircuitIR& c, std::span<const std::uint8_t> gen_bits,
                    std::span<const std::uint8_t> evl_bits,
                    std::span<const std::uint8_t> partial_bits);

/// Stable digest of the circuit's canonical text, used for config agreement.
std::string circuit_digest_hex(const CircuitIR& c);

// ---------------------------------------------------------------------------
// Protocol augmentation.

struct AugmentationSpec {
  std::uint32_t tag_bits = 32;
  std::uint32_t encoding_width = 8;
  // Derived widths. Left at 0 they are filled in from the circuit; when set
  // they must match or augment_for_protocol throws.
  std::uint32_t pad_evl_bits = 0;
  std::uint32_t pad_gen_bits = 0;
  std::uint32_t mac_key_evl_bits = 0;
  std::uint32_t mac_key_gen_bits = 0;

  /// Widths implied by `c` for the given tag/encoding parameters.
  static AugmentationSpec for_circuit(const CircuitIR& c, std::uint32_t tag_bits,
                                      std::uint32_t encoding_width);
};

/// Where each piece of a party's augmented input lives.
struct AugmentedLayout {
  std::uint32_t gen_data_bits = 0;
  std::uint32_t gen_pad_bits = 0;
  std::uint32_t gen_mac_key_bits = 0;
  std::uint32_t evl_data_bits = 0;  // true evaluator bits before encoding
  std::uint32_t encoding_width = 1;
  std::uint32_t evl_pad_bits = 0;
  std::uint32_t evl_mac_key_bits = 0;
  std::uint32_t evl_output_data_bits = 0;
  std::uint32_t gen_output_data_bits = 0;
  std::uint32_t tag_bits = 0;

  bool evl_has_mac() const { return tag_bits > 0 && evl_output_data_bits > 0; }
  bool gen_has_mac() const { return tag_bits > 0 && gen_output_data_bits > 0; }
  std::uint32_t evl_encoded_bits() const { return evl_data_bits * encoding_width; }

  /// [data | pad | mac key]
  Bits gen_input(std::span<const std::uint8_t> data, std::span<const std::uint8_t> pad,
                 std::span<const std::uint8_t> mac_key) const;
  /// [encoded shares | pad | mac key]
  Bits evl_input(std::span<const std::uint8_t> shares, std::span<const std::uint8_t> pad,
                 std::span<const std::uint8_t> mac_key) const;
};

struct AugmentedCircuit {
  CircuitIR circuit;
  AugmentedLayout layout;
};

AugmentedCircuit augment_for_protocol(const CircuitIR& c, const AugmentationSpec& spec);

/// Toeplitz GF(2) MAC: tag_i = XOR_j key[i+j] & msg[j]. key has msg+tag-1 bits.
Bits toeplitz_mac(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg,
                  std::uint32_t tag_bits);

}  // namespace pgc::circuit
