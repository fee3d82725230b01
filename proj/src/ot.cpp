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

#include "pgc/ot.hpp"

#include <sodium.h>

#include <cstring>

namespace pgc::ot {

using crypto::Domain;
using crypto::Prg;
using transport::Frame;

OtStats& OtStats::operator+=(const OtStats& o) {
  base_sessions += o.base_sessions;
  base_transfers += o.base_transfers;
  public_key_ops += o.public_key_ops;
  extension_sessions += o.extension_sessions;
  extended_transfers += o.extended_transfers;
  outsourced_ot_calls += o.outsourced_ot_calls;
  cut_and_choose_ot_calls += o.cut_and_choose_ot_calls;
  return *this;
}

EncodedInput encode_input(std::span<const std::uint8_t> bits, unsigned width, Prg& rng) {
  if (width == 0) throw Error("encoding width must be at least 1");
  EncodedInput e;
  e.width = width;
  e.true_bits.assign(bits.begin(), bits.end());
  for (std::uint8_t b : bits) {
    std::uint8_t acc = 0;
    for (unsigned s = 0; s + 1 < width; ++s) {
      const std::uint8_t r = rng.next_bit() ? 1 : 0;
      acc ^= r;
      e.shares.push_back(r);
    }
    e.shares.push_back(static_cast<std::uint8_t>(acc ^ (b & 1U)));
  }
  return e;
}

Bits decode_input(std::span<const std::uint8_t> shares, unsigned width) {
  if (width == 0 || shares.size() % width != 0) throw Error("share count is not a multiple of the width");
  Bits out(shares.size() / width, 0);
  for (std::size_t i = 0; i < shares.size(); ++i) out[i / width] ^= shares[i];
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kPointBytes = crypto_core_ristretto255_BYTES;
using Point = std::array<std::uint8_t, kPointBytes>;
using Scalar = std::array<std::uint8_t, crypto_core_ristretto255_SCALARBYTES>;

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw OtError("libsodium initialisation failed");
}

Scalar random_scalar(Prg& rng) {
  std::uint8_t wide[crypto_core_ristretto255_NONREDUCEDSCALARBYTES];
  rng.fill(wide);
  Scalar s;
  crypto_core_ristretto255_scalar_reduce(s.data(), wide);
  return s;
}

Point mult(const Scalar& s, const Point& p) {
  Point out;
  if (crypto_scalarmult_ristretto255(out.data(), s.data(), p.data()) != 0) {
    throw OtError("base OT: degenerate group element");
  }
  return out;
}

Point mult_base(const Scalar& s) {
  Point out;
  if (crypto_scalarmult_ristretto255_base(out.data(), s.data()) != 0) {
    throw OtError("base OT: degenerate scalar");
  }
  return out;
}

Point read_point(ByteReader& r) {
  Point p;
  const auto b = r.bytes(kPointBytes);
  std::copy(b.begin(), b.end(), p.begin());
  if (crypto_core_ristretto255_is_valid_point(p.data()) != 1) {
    throw OtError("base OT: invalid group element");
  }
  return p;
}

Block point_key(std::size_t j, const Point& a, const Point& b, const Point& shared) {
  crypto::Sha256 h;
  h.update(std::string_view("pgc-base-ot")).update_u64(j);
  h.update(a).update(b).update(shared);
  return crypto::digest_block(h.finish());
}

void write_block(ByteWriter& w, const Block& b) { w.block(b, 128); }
Block read_block(ByteReader& r) { return r.block(128); }

}  // namespace

void base_ot_send(Link& link, std::uint8_t phase, BaseOtKind kind,
                  std::span<const std::pair<Block, Block>> pairs, Prg& rng, OtStats& stats) {
  ++stats.base_sessions;
  stats.base_transfers += pairs.size();
  if (kind == BaseOtKind::kDealer) {
    ByteWriter w;
    for (const auto& [m0, m1] : pairs) {
      write_block(w, m0);
      write_block(w, m1);
    }
    link.send(phase, kMsgBaseCipher, std::move(w).take());
    return;
  }
  ensure_sodium();
  const Scalar a = random_scalar(rng);
  const Point A = mult_base(a);
  ++stats.public_key_ops;
  link.send(phase, kMsgBaseSetup, Bytes(A.begin(), A.end()));

  const Frame choice = link.expect(phase, kMsgBaseChoice);
  ByteReader r(choice.payload);
  ByteWriter w;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const Point B = read_point(r);
    Point B_minus_A;
    crypto_core_ristretto255_sub(B_minus_A.data(), B.data(), A.data());
    const Block k0 = point_key(j, A, B, mult(a, B));
    const Block k1 = point_key(j, A, B, mult(a, B_minus_A));
    stats.public_key_ops += 2;
    write_block(w, pairs[j].first ^ k0);
    write_block(w, pairs[j].second ^ k1);
  }
  r.expect_done("base OT choice message");
  link.send(phase, kMsgBaseCipher, std::move(w).take());
}

std::vector<Block> base_ot_receive(Link& link, std::uint8_t phase, BaseOtKind kind,
                                   std::span<const std::uint8_t> choices, Prg& rng,
                                   OtStats& stats) {
  ++stats.base_sessions;
  stats.base_transfers += choices.size();
  std::vector<Block> out;
  if (kind == BaseOtKind::kDealer) {
    const Frame f = link.expect(phase, kMsgBaseCipher);
    ByteReader r(f.payload);
    for (std::uint8_t c : choices) {
      const Block m0 = read_block(r);
      const Block m1 = read_block(r);
      out.push_back(c ? m1 : m0);
    }
    r.expect_done("dealer OT message");
    return out;
  }
  ensure_sodium();
  const Frame setup = link.expect(phase, kMsgBaseSetup);
  ByteReader sr(setup.payload);
  const Point A = read_point(sr);
  sr.expect_done("base OT setup");

  ByteWriter w;
  std::vector<Block> keys;
  for (std::size_t j = 0; j < choices.size(); ++j) {
    const Scalar b = random_scalar(rng);
    Point B = mult_base(b);
    if (choices[j]) crypto_core_ristretto255_add(B.data(), B.data(), A.data());
    keys.push_back(point_key(j, A, B, mult(b, A)));
    stats.public_key_ops += 2;
    w.bytes(B);
  }
  link.send(phase, kMsgBaseChoice, std::move(w).take());

  const Frame f = link.expect(phase, kMsgBaseCipher);
  ByteReader r(f.payload);
  for (std::size_t j = 0; j < choices.size(); ++j) {
    const Block e0 = read_block(r);
    const Block e1 = read_block(r);
    out.push_back((choices[j] ? e1 : e0) ^ keys[j]);
  }
  r.expect_done("base OT ciphertexts");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t padded_rows(std::size_t m) { return (m + 127) / 128 * 128 + 128; }

// Row j of a column-major bit matrix, as a block with bit i from column i.
std::vector<Block> transpose(const std::vector<Bytes>& cols, std::size_t rows) {
  std::vector<Block> out(rows);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const Bytes& c = cols[i];
    for (std::size_t byte = 0; byte < c.size(); ++byte) {
      std::uint8_t v = c[byte];
      while (v != 0) {
        const int bit = __builtin_ctz(v);
        v &= static_cast<std::uint8_t>(v - 1);
        out[byte * 8 + static_cast<std::size_t>(bit)].set_bit(static_cast<unsigned>(i), true);
      }
    }
  }
  return out;
}

Block row_pad(const Block& row, std::size_t j) {
  return crypto::tweak_hash(row, Block{}, crypto::make_tweak(Domain::kOtRow, 0, j));
}

void check_base_count(unsigned k) {
  if (k == 0 || k > 128) throw OtError("extension base count must be in 1..128");
}

}  // namespace

void extend_send(Link& link, std::uint8_t phase, const ExtensionOptions& opt,
                 std::span<const std::pair<Block, Block>> pairs, Prg& rng, OtStats& stats) {
  if (pairs.empty()) return;
  check_base_count(opt.base_count);
  ++stats.extension_sessions;
  stats.extended_transfers += pairs.size();
  const unsigned k = opt.base_count;
  const std::size_t rows = padded_rows(pairs.size());

  Bits s(k);
  Block s_block;
  for (unsigned i = 0; i < k; ++i) {
    s[i] = rng.next_bit() ? 1 : 0;
    s_block.set_bit(i, s[i] != 0);
  }
  const auto seeds = base_ot_receive(link, phase, opt.base_kind, s, rng, stats);

  const Frame mf = link.expect(phase, kMsgExtMatrix);
  ByteReader mr(mf.payload);
  std::vector<Bytes> q(k);
  for (unsigned i = 0; i < k; ++i) {
    q[i] = Prg(seeds[i]).bytes(rows / 8);
    const auto u = mr.bytes(rows / 8);
    if (s[i]) {
      for (std::size_t b = 0; b < q[i].size(); ++b) q[i][b] ^= u[b];
    }
  }
  mr.expect_done("extension matrix");
  const auto q_rows = transpose(q, rows);

  // Correlation check over random linear combinations of all rows.
  const Block chi_seed = rng.next_block();
  ByteWriter cw;
  write_block(cw, chi_seed);
  link.send(phase, kMsgExtChallenge, std::move(cw).take());
  const Frame rf = link.expect(phase, kMsgExtResponse);
  ByteReader rr(rf.payload);
  const Block x = read_block(rr);
  const Block t = read_block(rr);
  rr.expect_done("extension check response");
  Prg chi(chi_seed);
  Block qsum;
  for (std::size_t j = 0; j < rows; ++j) qsum ^= crypto::gf_mul(chi.next_block(), q_rows[j]);
  if (qsum != (t ^ crypto::gf_mul(x, s_block))) {
    throw OtConsistencyError("OT extension consistency check failed");
  }

  ByteWriter w;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    write_block(w, pairs[j].first ^ row_pad(q_rows[j], j));
    write_block(w, pairs[j].second ^ row_pad(q_rows[j] ^ s_block, j));
  }
  link.send(phase, kMsgExtCipher, std::move(w).take());
}

std::vector<Block> extend_receive(Link& link, std::uint8_t phase, const ExtensionOptions& opt,
                                  std::span<const std::uint8_t> choices, Prg& rng,
                                  OtStats& stats) {
  if (choices.empty()) return {};
  check_base_count(opt.base_count);
  ++stats.extension_sessions;
  stats.extended_transfers += choices.size();
  const unsigned k = opt.base_count;
  const std::size_t m = choices.size();
  const std::size_t rows = padded_rows(m);

  std::vector<std::pair<Block, Block>> seeds(k);
  for (auto& [a, b] : seeds) {
    a = rng.next_block();
    b = rng.next_block();
  }
  base_ot_send(link, phase, opt.base_kind, seeds, rng, stats);

  Bits r(rows);
  for (std::size_t j = 0; j < rows; ++j) r[j] = j < m ? (choices[j] & 1U) : (rng.next_bit() ? 1 : 0);
  const Bytes r_packed = pack_bits(r);

  std::vector<Bytes> t(k);
  ByteWriter w;
  for (unsigned i = 0; i < k; ++i) {
    t[i] = Prg(seeds[i].first).bytes(rows / 8);
    Bytes u = Prg(seeds[i].second).bytes(rows / 8);
    for (std::size_t b = 0; b < u.size(); ++b) u[b] ^= t[i][b] ^ r_packed[b];
    if (opt.corrupt_columns && i % 2 == 0) u[0] ^= 1;
    w.bytes(u);
  }
  link.send(phase, kMsgExtMatrix, std::move(w).take());
  const auto t_rows = transpose(t, rows);

  const Frame cf = link.expect(phase, kMsgExtChallenge);
  ByteReader cr(cf.payload);
  Prg chi(read_block(cr));
  cr.expect_done("extension challenge");
  Block x, tsum;
  for (std::size_t j = 0; j < rows; ++j) {
    const Block c = chi.next_block();
    if (r[j]) x ^= c;
    tsum ^= crypto::gf_mul(c, t_rows[j]);
  }
  ByteWriter rw;
  write_block(rw, x);
  write_block(rw, tsum);
  link.send(phase, kMsgExtResponse, std::move(rw).take());

  const Frame yf = link.expect(phase, kMsgExtCipher);
  ByteReader yr(yf.payload);
  std::vector<Block> out;
  for (std::size_t j = 0; j < m; ++j) {
    const Block y0 = read_block(yr);
    const Block y1 = read_block(yr);
    out.push_back((r[j] ? y1 : y0) ^ row_pad(t_rows[j], j));
  }
  yr.expect_done("extension ciphertexts");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr unsigned kPermBit = 127;

Block oot_pad(const Block& key, std::size_t j, unsigned label_bits) {
  return crypto::tweak_hash(key, Block{}, crypto::make_tweak(Domain::kOtRow, 1, j))
      .truncated(label_bits);
}

}  // namespace

void oot_generator(Link& to_evl, Link& to_cloud, std::uint8_t phase,
                   const ExtensionOptions& opt, std::span<const std::pair<Block, Block>> seeds,
                   unsigned label_bits, Prg& rng, OtStats& stats) {
  ++stats.outsourced_ot_calls;
  if (seeds.empty()) return;
  ByteWriter cw;
  std::vector<std::pair<Block, Block>> offers;
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const bool pi = rng.next_bit();
    Block k[2] = {rng.next_block().truncated(kPermBit), rng.next_block().truncated(kPermBit)};
    const Block s[2] = {seeds[j].first, seeds[j].second};
    for (int c = 0; c < 2; ++c) {
      const int b = c ^ (pi ? 1 : 0);
      cw.block(s[b] ^ oot_pad(k[b], j, label_bits), label_bits);
    }
    Block m0 = k[0];
    Block m1 = k[1];
    m0.set_bit(kPermBit, pi);
    m1.set_bit(kPermBit, !pi);
    offers.emplace_back(m0, m1);
  }
  to_cloud.send(phase, kMsgOotCipher, std::move(cw).take());
  extend_send(to_evl, phase, opt, offers, rng, stats);
}

void oot_evaluator(Link& to_gen, Link& to_cloud, std::uint8_t phase,
                   const ExtensionOptions& opt, std::span<const std::uint8_t> choices, Prg& rng,
                   OtStats& stats) {
  ++stats.outsourced_ot_calls;
  if (choices.empty()) return;
  const auto got = extend_receive(to_gen, phase, opt, choices, rng, stats);
  Bits position;
  ByteWriter w;
  for (const Block& m : got) position.push_back(m.bit(kPermBit) ? 1 : 0);
  w.bits(position);
  for (const Block& m : got) w.block(m.truncated(kPermBit), 128);
  to_cloud.send(phase, kMsgOotForward, std::move(w).take());
}

std::vector<Block> oot_cloud(Link& from_gen, Link& from_evl, std::uint8_t phase,
                             std::size_t count, unsigned label_bits, OtStats& stats) {
  ++stats.outsourced_ot_calls;
  if (count == 0) return {};
  const Frame cf = from_gen.expect(phase, kMsgOotCipher);
  ByteReader cr(cf.payload);
  std::vector<std::pair<Block, Block>> ct;
  for (std::size_t j = 0; j < count; ++j) {
    const Block a = cr.block(label_bits);
    const Block b = cr.block(label_bits);
    ct.emplace_back(a, b);
  }
  cr.expect_done("outsourced OT ciphertexts");
  const Frame ff = from_evl.expect(phase, kMsgOotForward);
  ByteReader fr(ff.payload);
  const Bits position = fr.bits(count);
  std::vector<Block> seeds;
  for (std::size_t j = 0; j < count; ++j) {
    const Block key = fr.block(128);
    const Block& c = position[j] ? ct[j].second : ct[j].first;
    seeds.push_back(c ^ oot_pad(key, j, label_bits));
  }
  fr.expect_done("outsourced OT keys");
  return seeds;
}

// ---------------------------------------------------------------------------

Block evl_input_value(const Block& ikey, const Block& seed, std::uint32_t circuit,
                      std::uint32_t j, unsigned label_bits) {
  return crypto::tweak_hash(ikey, seed,
                            crypto::make_tweak(Domain::kEvlInput, circuit, std::uint64_t{j} << 1))
      .truncated(label_bits);
}

Block evl_input_opening(const Block& ikey, const Block& seed, std::uint32_t circuit,
                        std::uint32_t j, unsigned label_bits) {
  return crypto::tweak_hash(
             ikey, seed,
             crypto::make_tweak(Domain::kEvlInput, circuit, (std::uint64_t{j} << 1) | 1U))
      .truncated(label_bits);
}

Commitment commit_label(const Block& value, const Block& opening, std::uint32_t circuit,
                        std::uint32_t j) {
  crypto::Sha256 h;
  h.update(std::string_view("pgc-commit")).update_u64(circuit).update_u64(j);
  h.update(value).update(opening);
  const auto d = h.finish();
  Commitment c;
  std::copy_n(d.begin(), c.size(), c.begin());
  return c;
}

bool verify_opening(const Commitment& c, const Block& value, const Block& opening,
                    std::uint32_t circuit, std::uint32_t j) {
  return commit_label(value, opening, circuit, j) == c;
}

}  // namespace pgc::ot
