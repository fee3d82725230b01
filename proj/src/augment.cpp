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

#include "pgc/circuit.hpp"
#include "pgc/programs.hpp"

namespace pgc::circuit {

namespace {

std::uint32_t pad_width(std::size_t outputs, std::uint32_t tag_bits) {
  if (outputs == 0) return 0;
  return static_cast<std::uint32_t>(outputs) + tag_bits;
}

std::uint32_t mac_key_width(std::size_t outputs, std::uint32_t tag_bits) {
  if (outputs == 0 || tag_bits == 0) return 0;
  return static_cast<std::uint32_t>(outputs) + tag_bits - 1;
}

void check_width(std::uint32_t requested, std::uint32_t implied, const char* what) {
  if (requested != 0 && requested != implied) {
    throw Error(std::string("augment: width mismatch for ") + what + " (" +
                std::to_string(requested) + " given, circuit implies " + std::to_string(implied) +
                ")");
  }
}

Bits concat(std::initializer_list<std::span<const std::uint8_t>> parts) {
  Bits out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Output data masked by the pad, followed by the masked in-circuit tag.
std::vector<WireId> protect_outputs(Builder& b, const std::vector<WireId>& data,
                                    WireId pad_base, WireId key_base, std::uint32_t tag_bits,
                                    bool party_is_gen) {
  auto pad = [&](std::uint32_t k) { return party_is_gen ? b.gen_in(pad_base + k) : b.evl_in(pad_base + k); };
  auto key = [&](std::uint32_t k) { return party_is_gen ? b.gen_in(key_base + k) : b.evl_in(key_base + k); };
  std::vector<WireId> out;
  const auto L = static_cast<std::uint32_t>(data.size());
  for (std::uint32_t j = 0; j < L; ++j) out.push_back(b.xor_(data[j], pad(j)));
  for (std::uint32_t t = 0; t < tag_bits; ++t) {
    WireId acc = b.and_(key(t), data[0]);
    for (std::uint32_t j = 1; j < L; ++j) acc = b.xor_(acc, b.and_(key(t + j), data[j]));
    out.push_back(b.xor_(acc, pad(L + t)));
  }
  return out;
}

}  // namespace

AugmentationSpec AugmentationSpec::for_circuit(const CircuitIR& c, std::uint32_t tag_bits,
                                               std::uint32_t encoding_width) {
  AugmentationSpec s;
  s.tag_bits = tag_bits;
  s.encoding_width = encoding_width;
  s.pad_evl_bits = pad_width(c.evl_outputs.size(), tag_bits);
  s.pad_gen_bits = pad_width(c.gen_outputs.size(), tag_bits);
  s.mac_key_evl_bits = mac_key_width(c.evl_outputs.size(), tag_bits);
  s.mac_key_gen_bits = mac_key_width(c.gen_outputs.size(), tag_bits);
  return s;
}

Bits AugmentedLayout::gen_input(std::span<const std::uint8_t> data,
                                std::span<const std::uint8_t> pad,
                                std::span<const std::uint8_t> mac_key) const {
  if (data.size() != gen_data_bits || pad.size() != gen_pad_bits ||
      mac_key.size() != gen_mac_key_bits) {
    throw Error("generator input does not match the augmented layout");
  }
  return concat({data, pad, mac_key});
}

Bits AugmentedLayout::evl_input(std::span<const std::uint8_t> shares,
                                std::span<const std::uint8_t> pad,
                                std::span<const std::uint8_t> mac_key) const {
  if (shares.size() != evl_encoded_bits() || pad.size() != evl_pad_bits ||
      mac_key.size() != evl_mac_key_bits) {
    throw Error("evaluator input does not match the augmented layout");
  }
  return concat({shares, pad, mac_key});
}

AugmentedCircuit augment_for_protocol(const CircuitIR& c, const AugmentationSpec& spec) {
  validate(c);
  if (spec.encoding_width == 0) throw Error("augment: encoding width must be at least 1");
  const AugmentationSpec implied =
      AugmentationSpec::for_circuit(c, spec.tag_bits, spec.encoding_width);
  check_width(spec.pad_evl_bits, implied.pad_evl_bits, "evaluator pad");
  check_width(spec.pad_gen_bits, implied.pad_gen_bits, "generator pad");
  check_width(spec.mac_key_evl_bits, implied.mac_key_evl_bits, "evaluator MAC key");
  check_width(spec.mac_key_gen_bits, implied.mac_key_gen_bits, "generator MAC key");

  AugmentedLayout lay;
  lay.gen_data_bits = c.gen_input_count;
  lay.gen_pad_bits = implied.pad_gen_bits;
  lay.gen_mac_key_bits = implied.mac_key_gen_bits;
  lay.evl_data_bits = c.evl_input_count;
  lay.encoding_width = spec.encoding_width;
  lay.evl_pad_bits = implied.pad_evl_bits;
  lay.evl_mac_key_bits = implied.mac_key_evl_bits;
  lay.evl_output_data_bits = static_cast<std::uint32_t>(c.evl_outputs.size());
  lay.gen_output_data_bits = static_cast<std::uint32_t>(c.gen_outputs.size());
  lay.tag_bits = spec.tag_bits;

  const std::uint32_t k = spec.encoding_width;
  Builder b(lay.gen_data_bits + lay.gen_pad_bits + lay.gen_mac_key_bits,
            lay.evl_encoded_bits() + lay.evl_pad_bits + lay.evl_mac_key_bits,
            c.partial_input_count);

  std::vector<WireId> map(c.wire_count());
  for (std::uint32_t i = 0; i < c.gen_input_count; ++i) map[c.gen_input(i)] = b.gen_in(i);
  for (std::uint32_t i = 0; i < c.evl_input_count; ++i) {
    WireId acc = b.evl_in(i * k);
    for (std::uint32_t s = 1; s < k; ++s) acc = b.xor_(acc, b.evl_in(i * k + s));
    map[c.evl_input(i)] = acc;
  }
  for (std::uint32_t i = 0; i < c.partial_input_count; ++i) {
    map[c.partial_input(i)] = b.partial_in(i);
  }
  for (const Gate& g : c.gates) {
    switch (g.op) {
      case Op::kAnd:
        map[g.id] = b.and_(map[g.in0], map[g.in1]);
        break;
      case Op::kXor:
        map[g.id] = b.xor_(map[g.in0], map[g.in1]);
        break;
      case Op::kNot:
        map[g.id] = b.not_(map[g.in0]);
        break;
      case Op::kOr:
        map[g.id] = b.or_(map[g.in0], map[g.in1]);
        break;
    }
  }

  auto mapped = [&](const std::vector<WireId>& ws) {
    std::vector<WireId> out;
    for (WireId w : ws) out.push_back(map[w]);
    return out;
  };
  if (!c.evl_outputs.empty()) {
    const WireId pad_base = lay.evl_encoded_bits();
    const auto outs = protect_outputs(b, mapped(c.evl_outputs), pad_base,
                                      pad_base + lay.evl_pad_bits,
                                      lay.evl_has_mac() ? lay.tag_bits : 0, false);
    for (WireId w : outs) b.out_evl(w);
  }
  if (!c.gen_outputs.empty()) {
    const WireId pad_base = lay.gen_data_bits;
    const auto outs = protect_outputs(b, mapped(c.gen_outputs), pad_base,
                                      pad_base + lay.gen_pad_bits,
                                      lay.gen_has_mac() ? lay.tag_bits : 0, true);
    for (WireId w : outs) b.out_gen(w);
  }
  for (WireId w : c.saved_wires) b.save(map[w]);
  return {b.build(), lay};
}

}  // namespace pgc::circuit
