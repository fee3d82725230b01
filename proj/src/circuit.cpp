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

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

#include "pgc/crypto.hpp"

namespace pgc::circuit {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kAnd:
      return "AND";
    case Op::kXor:
      return "XOR";
    case Op::kOr:
      return "OR";
    case Op::kNot:
      return "NOT";
  }
  return "?";
}

std::size_t CircuitIR::and_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.op == Op::kAnd; }));
}

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : FormatError(line == 0 ? msg
                            : "line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

std::uint32_t parse_number(const Token& t, std::size_t line) {
  std::uint32_t v = 0;
  const auto* end = t.text.data() + t.text.size();
  auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("expected a non-negative integer, got '" + std::string(t.text) + "'", line,
                     t.column);
  }
  return v;
}

void expect_keyword(const Token& t, std::string_view kw, std::size_t line) {
  if (t.text != kw) {
    throw ParseError("expected '" + std::string(kw) + "', got '" + std::string(t.text) + "'", line,
                     t.column);
  }
}

struct Located {
  std::size_t line;
  std::size_t column;
};

}  // namespace

CircuitIR parse_circuit(std::string_view text) {
  CircuitIR c;
  bool have_header = false;
  std::vector<Located> gate_pos;       // per gate: position of the gate line
  std::vector<std::array<Located, 2>> in_pos;
  std::vector<std::pair<WireId, Located>> refs;  // output/save references

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;

    const auto& kw = toks[0];
    if (!have_header) {
      expect_keyword(kw, "inputs", line_no);
      if (toks.size() != 7) throw ParseError("malformed inputs line", line_no, kw.column);
      expect_keyword(toks[1], "gen", line_no);
      c.gen_input_count = parse_number(toks[2], line_no);
      expect_keyword(toks[3], "evl", line_no);
      c.evl_input_count = parse_number(toks[4], line_no);
      expect_keyword(toks[5], "partial", line_no);
      c.partial_input_count = parse_number(toks[6], line_no);
      have_header = true;
      continue;
    }
    if (kw.text == "gate") {
      if (toks.size() < 4) throw ParseError("gate line needs an id, op and inputs", line_no, kw.column);
      Gate g;
      g.id = parse_number(toks[1], line_no);
      const auto op = toks[2].text;
      if (op == "AND") {
        g.op = Op::kAnd;
      } else if (op == "XOR") {
        g.op = Op::kXor;
      } else if (op == "OR") {
        g.op = Op::kOr;
      } else if (op == "NOT") {
        g.op = Op::kNot;
      } else {
        throw ParseError("unknown gate op '" + std::string(op) + "'", line_no, toks[2].column);
      }
      const std::size_t want = 3 + g.arity();
      if (toks.size() != want) {
        throw ParseError(std::string(op) + " takes " + std::to_string(g.arity()) + " input(s)",
                         line_no, toks[2].column);
      }
      g.in0 = parse_number(toks[3], line_no);
      std::array<Located, 2> ip{Located{line_no, toks[3].column}, Located{line_no, toks[3].column}};
      if (g.arity() == 2) {
        g.in1 = parse_number(toks[4], line_no);
        ip[1] = {line_no, toks[4].column};
      }
      c.gates.push_back(g);
      gate_pos.push_back({line_no, toks[1].column});
      in_pos.push_back(ip);
      continue;
    }
    if (kw.text == "out") {
      if (toks.size() < 2) throw ParseError("out needs a party", line_no, kw.column);
      std::vector<WireId>* dst = nullptr;
      if (toks[1].text == "evl") {
        dst = &c.evl_outputs;
      } else if (toks[1].text == "gen") {
        dst = &c.gen_outputs;
      } else {
        throw ParseError("out party must be 'evl' or 'gen'", line_no, toks[1].column);
      }
      for (std::size_t i = 2; i < toks.size(); ++i) {
        dst->push_back(parse_number(toks[i], line_no));
        refs.push_back({dst->back(), {line_no, toks[i].column}});
      }
      continue;
    }
    if (kw.text == "save") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        c.saved_wires.push_back(parse_number(toks[i], line_no));
        refs.push_back({c.saved_wires.back(), {line_no, toks[i].column}});
      }
      continue;
    }
    if (kw.text == "inputs") throw ParseError("duplicate inputs line", line_no, kw.column);
    throw ParseError("unknown directive '" + std::string(kw.text) + "'", line_no, kw.column);
  }
  if (!have_header) throw ParseError("missing inputs line", 0, 0);

  // Definitions, with positions for diagnostics.
  const std::uint64_t total = std::uint64_t{c.input_count()} + c.gates.size();
  std::vector<std::int64_t> defined_at(total, -1);  // gate index, or -2 for inputs
  for (WireId w = 0; w < c.input_count(); ++w) defined_at[w] = -2;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (g.id >= total) {
      throw ParseError("wire id " + std::to_string(g.id) + " leaves a gap (ids must be dense, max " +
                           std::to_string(total - 1) + ")",
                       gate_pos[i].line, gate_pos[i].column);
    }
    if (defined_at[g.id] != -1) {
      throw ParseError("duplicate wire definition " + std::to_string(g.id), gate_pos[i].line,
                       gate_pos[i].column);
    }
    defined_at[g.id] = static_cast<std::int64_t>(i);
  }
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    const WireId ins[2] = {g.in0, g.in1};
    for (unsigned k = 0; k < g.arity(); ++k) {
      const WireId w = ins[k];
      if (w >= total || defined_at[w] == -1) {
        throw ParseError("undefined wire reference " + std::to_string(w), in_pos[i][k].line,
                         in_pos[i][k].column);
      }
      if (defined_at[w] >= static_cast<std::int64_t>(i)) {
        throw ParseError("non-topological order: wire " + std::to_string(w) +
                             " is used before it is defined",
                         in_pos[i][k].line, in_pos[i][k].column);
      }
    }
  }
  for (const auto& [w, loc] : refs) {
    if (w >= total || defined_at[w] == -1) {
      throw ParseError("undefined wire reference " + std::to_string(w), loc.line, loc.column);
    }
  }

  CircuitIR lowered = lower_or_gates(c);
  validate(lowered);
  return lowered;
}

std::string emit_circuit(const CircuitIR& c) {
  std::ostringstream os;
  os << "inputs gen " << c.gen_input_count << " evl " << c.evl_input_count << " partial "
     << c.partial_input_count << '\n';
  for (const Gate& g : c.gates) {
    os << "gate " << g.id << ' ' << op_name(g.op) << ' ' << g.in0;
    if (g.arity() == 2) os << ' ' << g.in1;
    os << '\n';
  }
  auto list = [&os](std::string_view head, const std::vector<WireId>& ids) {
    os << head;
    for (WireId w : ids) os << ' ' << w;
    os << '\n';
  };
  list("out evl", c.evl_outputs);
  list("out gen", c.gen_outputs);
  list("save", c.saved_wires);
  return os.str();
}

void validate(const CircuitIR& c) {
  const std::uint64_t total = std::uint64_t{c.input_count()} + c.gates.size();
  std::vector<std::uint8_t> defined(total, 0);
  for (WireId w = 0; w < c.input_count(); ++w) defined[w] = 1;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    const WireId ins[2] = {g.in0, g.in1};
    for (unsigned k = 0; k < g.arity(); ++k) {
      if (ins[k] >= total || !defined[ins[k]]) {
        throw ValidationError("gate " + std::to_string(g.id) + " reads wire " +
                              std::to_string(ins[k]) + " before it is defined");
      }
    }
    if (g.id >= total) {
      throw ValidationError("wire id " + std::to_string(g.id) + " is not dense");
    }
    if (defined[g.id]) {
      throw ValidationError("duplicate wire definition " + std::to_string(g.id));
    }
    defined[g.id] = 1;
  }
  auto check_refs = [&](const std::vector<WireId>& ids, std::string_view what) {
    for (WireId w : ids) {
      if (w >= total || !defined[w]) {
        throw ValidationError(std::string(what) + " references undefined wire " +
                              std::to_string(w));
      }
    }
  };
  check_refs(c.evl_outputs, "evaluator output");
  check_refs(c.gen_outputs, "generator output");
  check_refs(c.saved_wires, "saved wire list");
}

CircuitIR lower_or_gates(const CircuitIR& c) {
  const bool has_or =
      std::any_of(c.gates.begin(), c.gates.end(), [](const Gate& g) { return g.op == Op::kOr; });
  if (!has_or) return c;
  CircuitIR out = c;
  out.gates.clear();
  WireId next = c.wire_count();
  for (const Gate& g : c.gates) {
    if (g.op != Op::kOr) {
      out.gates.push_back(g);
      continue;
    }
    const WireId x = next++;
    const WireId a = next++;
    out.gates.push_back({x, Op::kXor, g.in0, g.in1});
    out.gates.push_back({a, Op::kAnd, g.in0, g.in1});
    out.gates.push_back({g.id, Op::kXor, x, a});
  }
  return out;
}

Bits simulate_wires(const CircuitIR& c, std::span<const std::uint8_t> gen_bits,
                    std::span<const std::uint8_t> evl_bits,
                    std::span<const std::uint8_t> partial_bits) {
  if (gen_bits.size() != c.gen_input_count || evl_bits.size() != c.evl_input_count ||
      partial_bits.size() != c.partial_input_count) {
    throw Error("simulate_plaintext: input length mismatch (gen " +
                std::to_string(gen_bits.size()) + "/" + std::to_string(c.gen_input_count) +
                ", evl " + std::to_string(evl_bits.size()) + "/" +
                std::to_string(c.evl_input_count) + ", partial " +
                std::to_string(partial_bits.size()) + "/" +
                std::to_string(c.partial_input_count) + ")");
  }
  Bits v(c.wire_count(), 0);
  std::copy(gen_bits.begin(), gen_bits.end(), v.begin());
  std::copy(evl_bits.begin(), evl_bits.end(), v.begin() + c.gen_input_count);
  std::copy(partial_bits.begin(), partial_bits.end(),
            v.begin() + c.gen_input_count + c.evl_input_count);
  for (const Gate& g : c.gates) {
    switch (g.op) {
      case Op::kAnd:
        v[g.id] = v[g.in0] & v[g.in1];
        break;
      case Op::kXor:
        v[g.id] = v[g.in0] ^ v[g.in1];
        break;
      case Op::kOr:
        v[g.id] = v[g.in0] | v[g.in1];
        break;
      case Op::kNot:
        v[g.id] = v[g.in0] ^ 1U;
        break;
    }
  }
  return v;
}

PlainOutputs simulate_plaintext(const CircuitIR& c, std::span<const std::uint8_t> gen_bits,
                                std::span<const std::uint8_t> evl_bits,
                                std::span<const std::uint8_t> partial_bits) {
  const Bits v = simulate_wires(c, gen_bits, evl_bits, partial_bits);
  PlainOutputs out;
  for (WireId w : c.evl_outputs) out.evl.push_back(v[w]);
  for (WireId w : c.gen_outputs) out.gen.push_back(v[w]);
  for (WireId w : c.saved_wires) out.saved.push_back(v[w]);
  return out;
}

std::string circuit_digest_hex(const CircuitIR& c) {
  const std::string text = emit_circuit(c);
  const auto d = crypto::sha256(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return to_hex(d);
}

Bits toeplitz_mac(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg,
                  std::uint32_t tag_bits) {
  if (tag_bits == 0 || msg.empty()) return {};
  if (key.size() != msg.size() + tag_bits - 1) {
    throw Error("toeplitz_mac: key must have msg+tag-1 bits");
  }
  Bits tag(tag_bits, 0);
  for (std::uint32_t i = 0; i < tag_bits; ++i) {
    std::uint8_t acc = 0;
    for (std::size_t j = 0; j < msg.size(); ++j) acc ^= key[i + j] & msg[j];
    tag[i] = acc;
  }
  return tag;
}

}  // namespace pgc::circuit
