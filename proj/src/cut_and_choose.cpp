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

#include "pgc/cut_and_choose.hpp"

#include <algorithm>

namespace pgc::cnc {

std::uint32_t eval_count_for(std::uint32_t circuits) { return 2 * circuits / 5; }

std::uint32_t CircuitSplit::eval_count() const {
  return static_cast<std::uint32_t>(std::count(selection.begin(), selection.end(), 0));
}

std::vector<std::uint32_t> CircuitSplit::eval_circuits() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < size(); ++i) {
    if (!is_check(i)) out.push_back(i);
  }
  return out;
}

std::vector<std::uint32_t> CircuitSplit::check_circuits() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < size(); ++i) {
    if (is_check(i)) out.push_back(i);
  }
  return out;
}

CircuitSplit select_split(std::uint32_t circuits, crypto::Prg& rng) {
  if (circuits < 5) throw Error("cut-and-choose needs at least 5 circuits");
  CircuitSplit s;
  s.selection.assign(circuits, 1);
  const std::uint32_t n = eval_count_for(circuits);
  std::fill_n(s.selection.begin(), n, 0);
  for (std::uint32_t i = circuits - 1; i > 0; --i) {
    std::swap(s.selection[i], s.selection[rng.uniform(i + 1)]);
  }
  return s;
}

std::vector<CircuitKeyPair> make_key_pairs(std::uint32_t circuits, unsigned label_bits,
                                           crypto::Prg& rng) {
  std::vector<CircuitKeyPair> out(circuits);
  for (auto& p : out) {
    p.check_key = rng.label(label_bits);
    p.eval_key = rng.label(label_bits);
  }
  return out;
}

Block evolve_key(const Block& key, unsigned label_bits) {
  crypto::Sha256 h;
  h.update(std::string_view("pgc-evolve")).update(key);
  return crypto::digest_block(h.finish(), label_bits);
}

std::vector<CircuitKeyPair> evolve_keys(const std::vector<CircuitKeyPair>& keys,
                                        unsigned label_bits) {
  std::vector<CircuitKeyPair> out;
  for (const auto& k : keys) {
    out.push_back({evolve_key(k.check_key, label_bits), evolve_key(k.eval_key, label_bits)});
  }
  return out;
}

std::vector<Block> evolve_keys(const std::vector<Block>& keys, unsigned label_bits) {
  std::vector<Block> out;
  for (const auto& k : keys) out.push_back(evolve_key(k, label_bits));
  return out;
}

void cut_and_choose_ot_send(transport::Link& to_cloud, std::uint8_t phase,
                            const ot::ExtensionOptions& opt,
                            const std::vector<CircuitKeyPair>& keys, crypto::Prg& rng,
                            ot::OtStats& stats) {
  ++stats.cut_and_choose_ot_calls;
  std::vector<std::pair<Block, Block>> offers;
  for (const auto& k : keys) offers.emplace_back(k.eval_key, k.check_key);
  ot::extend_send(to_cloud, phase, opt, offers, rng, stats);
}

std::vector<Block> cut_and_choose_ot_receive(transport::Link& to_gen, std::uint8_t phase,
                                             const ot::ExtensionOptions& opt,
                                             const CircuitSplit& split, unsigned label_bits,
                                             crypto::Prg& rng, ot::OtStats& stats) {
  ++stats.cut_and_choose_ot_calls;
  auto keys = ot::extend_receive(to_gen, phase, opt, split.selection, rng, stats);
  for (auto& k : keys) {
    if (k.truncated(label_bits) != k) throw Error("cut-and-choose OT: key wider than K bits");
  }
  return keys;
}

Block hash_key(const Block& key, std::uint32_t circuit, unsigned label_bits) {
  crypto::Sha256 h;
  h.update(std::string_view("pgc-key-hash")).update_u64(circuit).update_u64(label_bits);
  h.update(key);
  return crypto::digest_block(h.finish());
}

std::vector<KeyHashPair> key_hash_pairs(const std::vector<CircuitKeyPair>& keys,
                                        unsigned label_bits) {
  std::vector<KeyHashPair> out;
  for (std::uint32_t i = 0; i < keys.size(); ++i) {
    out.push_back({hash_key(keys[i].check_key, i, label_bits),
                   hash_key(keys[i].eval_key, i, label_bits)});
  }
  return out;
}

CircuitSplit verify_split_hashes(const std::vector<KeyHashPair>& gen_pairs,
                                 const std::vector<CloudKeyClaim>& cloud_claims) {
  if (gen_pairs.size() != cloud_claims.size()) {
    throw SplitMismatchError(0, "split verification: circuit counts differ");
  }
  CircuitSplit s;
  for (std::uint32_t i = 0; i < gen_pairs.size(); ++i) {
    const auto& c = cloud_claims[i];
    const Block& expected = c.check ? gen_pairs[i].check_hash : gen_pairs[i].eval_hash;
    if (expected != c.hash) {
      throw SplitMismatchError(i, "split verification failed at circuit " + std::to_string(i));
    }
    s.selection.push_back(c.check ? 1 : 0);
  }
  if (s.eval_count() != eval_count_for(s.size())) {
    throw SplitMismatchError(0, "split verification: wrong number of evaluation circuits");
  }
  return s;
}

Bytes seal_package(const Block& key, std::uint32_t circuit, std::uint64_t execution,
                   std::uint8_t which, std::span<const std::uint8_t> data) {
  Bytes out =
      crypto::keystream(key, crypto::make_tweak(crypto::Domain::kKeystream, circuit,
                                                (execution << 1) | which),
                        data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= data[i];
  return out;
}

namespace {
constexpr std::uint8_t kKeyMagic[4] = {'P', 'G', 'C', '1'};
}

Bytes encode_key_file(const KeyRing& ring, unsigned label_bits) {
  ByteWriter w;
  w.bytes(kKeyMagic);
  w.u8(static_cast<std::uint8_t>(ring.role));
  w.u32(ring.split.size());
  w.bits(ring.split.selection);
  switch (ring.role) {
    case Role::kGenerator:
      if (ring.pairs.size() != ring.split.size()) throw Error("key file: key count mismatch");
      for (const auto& p : ring.pairs) {
        w.block(p.check_key, label_bits);
        w.block(p.eval_key, label_bits);
      }
      break;
    case Role::kCloud:
      if (ring.selected.size() != ring.split.size()) throw Error("key file: key count mismatch");
      for (std::uint32_t i = 0; i < ring.split.size(); ++i) {
        w.block(ring.selected[i], label_bits);
        w.u8(ring.split.selection[i]);
      }
      break;
    case Role::kEvaluator:
      break;
  }
  return std::move(w).take();
}

KeyRing decode_key_file(std::span<const std::uint8_t> data, unsigned label_bits) {
  ByteReader r(data);
  const auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kKeyMagic)) throw FormatError("key file: bad magic");
  KeyRing ring;
  const std::uint8_t role = r.u8();
  if (role < 1 || role > 3) throw FormatError("key file: bad role");
  ring.role = static_cast<Role>(role);
  const std::uint32_t s = r.u32();
  if (s > (1U << 20)) throw FormatError("key file: implausible circuit count");
  ring.split.selection = r.bits(s);
  for (std::uint32_t i = 0; i < s; ++i) {
    if (ring.role == Role::kGenerator) {
      CircuitKeyPair p;
      p.check_key = r.block(label_bits);
      p.eval_key = r.block(label_bits);
      ring.pairs.push_back(p);
    } else if (ring.role == Role::kCloud) {
      ring.selected.push_back(r.block(label_bits));
      if (r.u8() != ring.split.selection[i]) {
        throw FormatError("key file: selection bit disagrees with split");
      }
    }
  }
  r.expect_done("key file");
  return ring;
}

}  // namespace pgc::cnc
