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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgc/circuit.hpp"

namespace pgc::circuit {

/// Appends gates with sequential ids after a fixed input section, so every
/// built circuit is dense and topologically ordered by construction.
class Builder {
 public:
  Builder(std::uint32_t gen_inputs, std::uint32_t evl_inputs, std::uint32_t partial_inputs);

  WireId gen_in(std::uint32_t i) const;
  WireId evl_in(std::uint32_t i) const;
  WireId partial_in(std::uint32_t i) const;

  WireId and_(WireId a, WireId b) { return push(Op::kAnd, a, b); }
  WireId xor_(WireId a, WireId b) { return push(Op::kXor, a, b); }
  WireId not_(WireId a) { return push(Op::kNot, a, a); }
  /// Lowered on the spot: a ^ b ^ (a & b).
  WireId or_(WireId a, WireId b);
  /// sel ? on_one : on_zero
  WireId mux(WireId sel, WireId on_zero, WireId on_one);

  /// A fresh wire carrying constant 0 (XOR of an input with itself).
  WireId zero();
  WireId one() { return not_(zero()); }

  using Word = std::vector<WireId>;  // little-endian

  Word mux_word(WireId sel, const Word& on_zero, const Word& on_one);
  /// Single wire: 1 iff a == b.
  WireId equal(const Word& a, const Word& b);
  /// Single wire: 1 iff word == constant.
  WireId equal_const(const Word& a, std::uint64_t value);
  WireId is_zero(const Word& a);
  /// 1 iff a > b (unsigned).
  WireId greater_than(const Word& a, const Word& b);
  /// (a + b) mod 2^width, width = a.size().
  Word add(const Word& a, const Word& b);
  /// a + constant mod 2^width.
  Word add_const(const Word& a, std::uint64_t value);
  Word increment(const Word& a) { return add_const(a, 1); }
  Word constant(std::uint64_t value, std::size_t width);
  /// Word with the larger unsigned value.
  Word max(const Word& a, const Word& b);

  void out_evl(WireId w) { c_.evl_outputs.push_back(w); }
  void out_gen(WireId w) { c_.gen_outputs.push_back(w); }
  void save(WireId w) { c_.saved_wires.push_back(w); }

  std::uint32_t next_id() const { return c_.wire_count(); }
  CircuitIR build() const;

 private:
  WireId push(Op op, WireId a, WireId b);
  WireId anchor() const;

  CircuitIR c_;
};

/// Named builder programs. `spec` strings look like "millionaires:4",
/// "keyed_db:8:8", "map_set:64:8".
struct ProgramSpec {
  std::string name;
  std::vector<std::uint32_t> params;

  static ProgramSpec parse(std::string_view text);
  std::string to_string() const;
};

CircuitIR build_program(const ProgramSpec& spec);

/// Names understood by build_program.
std::vector<std::string> program_names();

// Individual builders.
CircuitIR millionaires(std::uint32_t bits);
CircuitIR keyed_db(std::uint32_t entries, std::uint32_t width);
CircuitIR keyed_db_saved(std::uint32_t entries, std::uint32_t width);
CircuitIR counter_init(std::uint32_t bits);
CircuitIR counter_increment(std::uint32_t bits);
CircuitIR counter_read(std::uint32_t bits);
CircuitIR counter_add(std::uint32_t bits, std::uint32_t amount);
/// One incremental longest-common-substring step appending one symbol to
/// each string; step 1 has no partial inputs.
CircuitIR lcs_step(std::uint32_t step, std::uint32_t max_len);
CircuitIR lcs_full(std::uint32_t len, std::uint32_t max_len);
CircuitIR map_start(std::uint32_t cells, std::uint32_t cell_bits = 8);
CircuitIR map_set(std::uint32_t cells, std::uint32_t cell_bits = 8);
CircuitIR map_get(std::uint32_t cells, std::uint32_t cell_bits = 8);

/// Width of a cell index for `cells` cells (at least 1).
std::uint32_t index_bits(std::uint32_t cells);
/// Width of LCS length values for strings up to max_len.
std::uint32_t lcs_value_bits(std::uint32_t max_len);

}  // namespace pgc::circuit
