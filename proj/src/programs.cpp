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

#include "pgc/programs.hpp"

#include <bit>
#include <charconv>

namespace pgc::circuit {

Builder::Builder(std::uint32_t gen_inputs, std::uint32_t evl_inputs,
                 std::uint32_t partial_inputs) {
  c_.gen_input_count = gen_inputs;
  c_.evl_input_count = evl_inputs;
  c_.partial_input_count = partial_inputs;
}

WireId Builder::gen_in(std::uint32_t i) const {
  if (i >= c_.gen_input_count) throw Error("builder: generator input out of range");
  return c_.gen_input(i);
}

WireId Builder::evl_in(std::uint32_t i) const {
  if (i >= c_.evl_input_count) throw Error("builder: evaluator input out of range");
  return c_.evl_input(i);
}

WireId Builder::partial_in(std::uint32_t i) const {
  if (i >= c_.partial_input_count) throw Error("builder: partial input out of range");
  return c_.partial_input(i);
}

WireId Builder::push(Op op, WireId a, WireId b) {
  const WireId id = c_.wire_count();
  if (a >= id || b >= id) throw Error("builder: gate reads an undefined wire");
  c_.gates.push_back({id, op, a, op == Op::kNot ? 0 : b});
  return id;
}

WireId Builder::anchor() const {
  if (c_.input_count() == 0) throw Error("builder: constants need at least one input wire");
  return 0;
}

WireId Builder::or_(WireId a, WireId b) { return xor_(xor_(a, b), and_(a, b)); }

WireId Builder::mux(WireId sel, WireId on_zero, WireId on_one) {
  return xor_(on_zero, and_(sel, xor_(on_zero, on_one)));
}

WireId Builder::zero() {
  const WireId a = anchor();
  return xor_(a, a);
}

Builder::Word Builder::mux_word(WireId sel, const Word& on_zero, const Word& on_one) {
  Word out(on_zero.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mux(sel, on_zero[i], on_one[i]);
  return out;
}

WireId Builder::equal(const Word& a, const Word& b) {
  WireId acc = not_(xor_(a[0], b[0]));
  for (std::size_t i = 1; i < a.size(); ++i) acc = and_(acc, not_(xor_(a[i], b[i])));
  return acc;
}

WireId Builder::equal_const(const Word& a, std::uint64_t value) {
  auto lit = [&](std::size_t i) { return ((value >> i) & 1U) ? a[i] : not_(a[i]); };
  WireId acc = lit(0);
  for (std::size_t i = 1; i < a.size(); ++i) acc = and_(acc, lit(i));
  return acc;
}

WireId Builder::is_zero(const Word& a) { return equal_const(a, 0); }

WireId Builder::greater_than(const Word& a, const Word& b) {
  // Scan from the least significant bit: a differing bit overrides the verdict.
  WireId gt = and_(xor_(a[0], b[0]), a[0]);
  for (std::size_t i = 1; i < a.size(); ++i) {
    gt = xor_(gt, and_(xor_(a[i], b[i]), xor_(a[i], gt)));
  }
  return gt;
}

Builder::Word Builder::add(const Word& a, const Word& b) {
  Word out(a.size());
  WireId carry = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const WireId axb = xor_(a[i], b[i]);
    if (i == 0) {
      out[i] = axb;
      carry = and_(a[i], b[i]);
      continue;
    }
    out[i] = xor_(axb, carry);
    if (i + 1 < a.size()) carry = xor_(and_(axb, carry), and_(a[i], b[i]));
  }
  return out;
}

Builder::Word Builder::add_const(const Word& a, std::uint64_t value) {
  Word out(a.size());
  std::optional<WireId> carry;  // empty while the carry is known to be 0
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool c = ((value >> i) & 1U) != 0;
    const bool last = i + 1 == a.size();
    if (!carry) {
      out[i] = c ? not_(a[i]) : a[i];
      if (c && !last) carry = a[i];
      continue;
    }
    const WireId s = xor_(a[i], *carry);
    out[i] = c ? not_(s) : s;
    if (!last) carry = c ? or_(a[i], *carry) : and_(a[i], *carry);
  }
  return out;
}

Builder::Word Builder::constant(std::uint64_t value, std::size_t width) {
  Word out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = ((value >> i) & 1U) ? one() : zero();
  return out;
}

Builder::Word Builder::max(const Word& a, const Word& b) {
  return mux_word(greater_than(a, b), b, a);
}

CircuitIR Builder::build() const {
  validate(c_);
  return c_;
}

// ---------------------------------------------------------------------------

namespace {

using Word = Builder::Word;

void require_positive(std::initializer_list<std::uint32_t> params, std::string_view name) {
  for (auto p : params) {
    if (p == 0) throw Error(std::string(name) + ": parameters must be positive");
  }
}

Word select_entry(Builder& b, const Word& index, const std::vector<Word>& entries) {
  const std::size_t width = entries.front().size();
  Word acc;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const WireId sel = b.equal_const(index, k);
    for (std::size_t bit = 0; bit < width; ++bit) {
      const WireId term = b.and_(sel, entries[k][bit]);
      if (k == 0) {
        acc.push_back(term);
      } else {
        acc[bit] = b.xor_(acc[bit], term);  // at most one selector is set
      }
    }
  }
  return acc;
}

struct LcsState {
  Word a;                  // symbols of the generator's string
  Word b;                  // symbols of the evaluator's string
  std::vector<Word> row;   // L[k][1..k]
  std::vector<Word> col;   // L[1..k-1][k]
  Word best;
};

std::uint32_t lcs_state_bits(std::uint32_t step, std::uint32_t width) {
  return 2 * step + 2 * step * width;
}

// Wires in saved order: a, b, row, col, best.
std::vector<WireId> flatten(const LcsState& s) {
  std::vector<WireId> out(s.a.begin(), s.a.end());
  out.insert(out.end(), s.b.begin(), s.b.end());
  for (const auto& w : s.row) out.insert(out.end(), w.begin(), w.end());
  for (const auto& w : s.col) out.insert(out.end(), w.begin(), w.end());
  out.insert(out.end(), s.best.begin(), s.best.end());
  return out;
}

LcsState unflatten(const std::vector<WireId>& wires, std::uint32_t step, std::uint32_t width) {
  LcsState s;
  std::size_t p = 0;
  auto take = [&](std::size_t n) {
    Word w(wires.begin() + static_cast<std::ptrdiff_t>(p),
           wires.begin() + static_cast<std::ptrdiff_t>(p + n));
    p += n;
    return w;
  };
  s.a = take(step);
  s.b = take(step);
  for (std::uint32_t j = 0; j < step; ++j) s.row.push_back(take(width));
  for (std::uint32_t i = 0; i + 1 < step; ++i) s.col.push_back(take(width));
  s.best = take(width);
  return s;
}

Word gated_increment(Builder& b, WireId match, const Word& prev) {
  Word inc = b.increment(prev);
  for (auto& w : inc) w = b.and_(match, w);
  return inc;
}

Word match_one(Builder& b, WireId match, std::uint32_t width) {
  Word w(width);
  w[0] = match;
  for (std::uint32_t i = 1; i < width; ++i) w[i] = b.zero();
  return w;
}

WireId bits_equal(Builder& b, WireId x, WireId y) { return b.not_(b.xor_(x, y)); }

// Appends one symbol to each string. `s` is empty for the first step.
LcsState lcs_extend(Builder& b, const LcsState& s, WireId a_new, WireId b_new,
                    std::uint32_t width) {
  const std::size_t k = s.a.size();
  LcsState n;
  n.a = s.a;
  n.a.push_back(a_new);
  n.b = s.b;
  n.b.push_back(b_new);
  // New row: L[k+1][j] for j = 1..k+1.
  for (std::size_t j = 0; j <= k; ++j) {
    const WireId m = bits_equal(b, a_new, n.b[j]);
    n.row.push_back(j == 0 ? match_one(b, m, width) : gated_increment(b, m, s.row[j - 1]));
  }
  // New column: L[i][k+1] for i = 1..k.
  for (std::size_t i = 0; i < k; ++i) {
    const WireId m = bits_equal(b, s.a[i], b_new);
    n.col.push_back(i == 0 ? match_one(b, m, width) : gated_increment(b, m, s.col[i - 1]));
  }
  Word best = k == 0 ? n.row[0] : s.best;
  for (std::size_t j = (k == 0 ? 1 : 0); j < n.row.size(); ++j) best = b.max(best, n.row[j]);
  for (const auto& w : n.col) best = b.max(best, w);
  n.best = best;
  return n;
}

Word input_word(Builder& b, std::uint32_t first, std::uint32_t width, char party) {
  Word w(width);
  for (std::uint32_t i = 0; i < width; ++i) {
    w[i] = party == 'g' ? b.gen_in(first + i) : party == 'e' ? b.evl_in(first + i)
                                                               : b.partial_in(first + i);
  }
  return w;
}

std::vector<Word> cells_from(Builder& b, std::uint32_t cells, std::uint32_t cell_bits, char party,
                             std::uint32_t first = 0) {
  std::vector<Word> out;
  for (std::uint32_t k = 0; k < cells; ++k) {
    out.push_back(input_word(b, first + k * cell_bits, cell_bits, party));
  }
  return out;
}

}  // namespace

std::uint32_t index_bits(std::uint32_t cells) {
  return cells <= 2 ? 1 : static_cast<std::uint32_t>(std::bit_width(cells - 1));
}

std::uint32_t lcs_value_bits(std::uint32_t max_len) {
  return static_cast<std::uint32_t>(std::bit_width(max_len));
}

CircuitIR millionaires(std::uint32_t bits) {
  require_positive({bits}, "millionaires");
  Builder b(bits, bits, 0);
  const WireId gt = b.greater_than(input_word(b, 0, bits, 'g'), input_word(b, 0, bits, 'e'));
  b.out_evl(gt);
  b.out_gen(gt);
  return b.build();
}

CircuitIR keyed_db(std::uint32_t entries, std::uint32_t width) {
  require_positive({entries, width}, "keyed_db");
  const std::uint32_t kb = index_bits(entries);
  Builder b(kb, entries * width, 0);
  const auto db = cells_from(b, entries, width, 'e');
  for (WireId w : select_entry(b, input_word(b, 0, kb, 'g'), db)) b.out_gen(w);
  for (std::uint32_t i = 0; i < entries * width; ++i) b.save(b.evl_in(i));
  return b.build();
}

CircuitIR keyed_db_saved(std::uint32_t entries, std::uint32_t width) {
  require_positive({entries, width}, "keyed_db_saved");
  const std::uint32_t kb = index_bits(entries);
  Builder b(kb, 0, entries * width);
  const auto db = cells_from(b, entries, width, 'p');
  for (WireId w : select_entry(b, input_word(b, 0, kb, 'g'), db)) b.out_gen(w);
  for (std::uint32_t i = 0; i < entries * width; ++i) b.save(b.partial_in(i));
  return b.build();
}

CircuitIR counter_init(std::uint32_t bits) {
  require_positive({bits}, "counter_init");
  Builder b(0, bits, 0);
  for (std::uint32_t i = 0; i < bits; ++i) b.save(b.evl_in(i));
  return b.build();
}

CircuitIR counter_increment(std::uint32_t bits) {
  require_positive({bits}, "counter");
  Builder b(0, 0, bits);
  for (WireId w : b.increment(input_word(b, 0, bits, 'p'))) {
    b.out_evl(w);
    b.save(w);
  }
  return b.build();
}

CircuitIR counter_read(std::uint32_t bits) {
  require_positive({bits}, "counter_read");
  Builder b(0, 0, bits);
  for (std::uint32_t i = 0; i < bits; ++i) {
    b.out_evl(b.partial_in(i));
    b.save(b.partial_in(i));
  }
  return b.build();
}

CircuitIR counter_add(std::uint32_t bits, std::uint32_t amount) {
  require_positive({bits}, "counter_add");
  Builder b(0, bits, 0);
  for (WireId w : b.add_const(input_word(b, 0, bits, 'e'), amount)) b.out_evl(w);
  return b.build();
}

CircuitIR lcs_step(std::uint32_t step, std::uint32_t max_len) {
  require_positive({step, max_len}, "lcs_step");
  if (step > max_len) throw Error("lcs_step: step exceeds max_len");
  const std::uint32_t width = lcs_value_bits(max_len);
  const std::uint32_t prev_bits = step == 1 ? 0 : lcs_state_bits(step - 1, width);
  Builder b(1, 1, prev_bits);
  LcsState prev;
  if (step > 1) prev = unflatten(input_word(b, 0, prev_bits, 'p'), step - 1, width);
  const LcsState next = lcs_extend(b, prev, b.gen_in(0), b.evl_in(0), width);
  for (WireId w : next.best) b.out_evl(w);
  for (WireId w : flatten(next)) b.save(w);
  return b.build();
}

CircuitIR lcs_full(std::uint32_t len, std::uint32_t max_len) {
  require_positive({len, max_len}, "lcs_full");
  if (len > max_len) throw Error("lcs_full: len exceeds max_len");
  const std::uint32_t width = lcs_value_bits(max_len);
  Builder b(len, len, 0);
  LcsState s;
  for (std::uint32_t k = 0; k < len; ++k) s = lcs_extend(b, s, b.gen_in(k), b.evl_in(k), width);
  for (WireId w : s.best) b.out_evl(w);
  return b.build();
}

CircuitIR map_start(std::uint32_t cells, std::uint32_t cell_bits) {
  require_positive({cells, cell_bits}, "map_start");
  Builder b(1, 0, 0);  // one generator anchor bit for constants
  for (std::uint32_t i = 0; i < cells * cell_bits; ++i) b.save(b.zero());
  return b.build();
}

CircuitIR map_set(std::uint32_t cells, std::uint32_t cell_bits) {
  require_positive({cells, cell_bits}, "map_set");
  const std::uint32_t ib = index_bits(cells);
  Builder b(0, cell_bits + ib, cells * cell_bits);
  const Word user = input_word(b, 0, cell_bits, 'e');
  const Word index = input_word(b, cell_bits, ib, 'e');
  const auto map = cells_from(b, cells, cell_bits, 'p');

  std::vector<WireId> sel(cells);
  for (std::uint32_t k = 0; k < cells; ++k) sel[k] = b.equal_const(index, k);
  Word current;
  for (std::uint32_t k = 0; k < cells; ++k) {
    for (std::uint32_t bit = 0; bit < cell_bits; ++bit) {
      const WireId term = b.and_(sel[k], map[k][bit]);
      if (k == 0) {
        current.push_back(term);
      } else {
        current[bit] = b.xor_(current[bit], term);
      }
    }
  }
  // Blocked when the target cell holds somebody else.
  const WireId blocked = b.and_(b.not_(b.is_zero(current)), b.not_(b.equal(current, user)));
  for (std::uint32_t k = 0; k < cells; ++k) {
    const WireId mine = b.equal(map[k], user);
    for (std::uint32_t bit = 0; bit < cell_bits; ++bit) {
      const WireId cleared = b.and_(map[k][bit], b.not_(mine));
      const WireId written = b.mux(sel[k], cleared, user[bit]);
      b.save(b.mux(blocked, written, map[k][bit]));
    }
  }
  for (WireId w : current) b.out_evl(w);
  return b.build();
}

CircuitIR map_get(std::uint32_t cells, std::uint32_t cell_bits) {
  require_positive({cells, cell_bits}, "map_get");
  const std::uint32_t ib = index_bits(cells);
  Builder b(0, ib, cells * cell_bits);
  const auto map = cells_from(b, cells, cell_bits, 'p');
  for (WireId w : select_entry(b, input_word(b, 0, ib, 'e'), map)) b.out_evl(w);
  for (std::uint32_t i = 0; i < cells * cell_bits; ++i) b.save(b.partial_in(i));
  return b.build();
}

// ---------------------------------------------------------------------------

ProgramSpec ProgramSpec::parse(std::string_view text) {
  ProgramSpec spec;
  std::size_t pos = text.find(':');
  spec.name = std::string(text.substr(0, pos));
  while (pos != std::string_view::npos) {
    const std::size_t next = text.find(':', pos + 1);
    const auto part = text.substr(pos + 1, next == text.npos ? text.npos : next - pos - 1);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw Error("program spec: bad parameter '" + std::string(part) + "'");
    }
    spec.params.push_back(v);
    pos = next;
  }
  if (spec.name.empty()) throw Error("program spec: empty name");
  return spec;
}

std::string ProgramSpec::to_string() const {
  std::string s = name;
  for (auto p : params) s += ":" + std::to_string(p);
  return s;
}

std::vector<std::string> program_names() {
  return {"millionaires", "keyed_db",    "keyed_db_saved", "counter_init", "counter",
          "counter_read", "counter_add", "lcs_step",       "lcs_full",     "map_start",
          "map_set",      "map_get"};
}

CircuitIR build_program(const ProgramSpec& spec) {
  const auto& p = spec.params;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (p.size() < lo || p.size() > hi) {
      throw Error(spec.name + ": expected " + std::to_string(lo) +
                  (lo == hi ? "" : "-" + std::to_string(hi)) + " parameter(s)");
    }
  };
  const auto& n = spec.name;
  if (n == "millionaires") return need(1, 1), millionaires(p[0]);
  if (n == "keyed_db") return need(2, 2), keyed_db(p[0], p[1]);
  if (n == "keyed_db_saved") return need(2, 2), keyed_db_saved(p[0], p[1]);
  if (n == "counter_init") return need(1, 1), counter_init(p[0]);
  if (n == "counter") return need(1, 1), counter_increment(p[0]);
  if (n == "counter_read") return need(1, 1), counter_read(p[0]);
  if (n == "counter_add") return need(2, 2), counter_add(p[0], p[1]);
  if (n == "lcs_step") return need(2, 2), lcs_step(p[0], p[1]);
  if (n == "lcs_full") return need(2, 2), lcs_full(p[0], p[1]);
  if (n == "map_start") return need(1, 2), map_start(p[0], p.size() > 1 ? p[1] : 8);
  if (n == "map_set") return need(1, 2), map_set(p[0], p.size() > 1 ? p[1] : 8);
  if (n == "map_get") return need(1, 2), map_get(p[0], p.size() > 1 ? p[1] : 8);
  throw Error("unsupported program '" + n + "'");
}

}  // namespace pgc::circuit
