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
#include <vector>

#include "pgc/common.hpp"
#include "pgc/crypto.hpp"
#include "pgc/ot.hpp"

namespace pgc::cnc {

/// selection[i] = 0: evaluation circuit, 1: check circuit.
struct CircuitSplit {
  Bits selection;

  bool operator==(const CircuitSplit&) const = default;
  std::uint32_t size() const { return static_cast<std::uint32_t>(selection.size()); }
  bool is_check(std::uint32_t i) const { return selection.at(i) != 0; }
  std::uint32_t eval_count() const;
  std::vector<std::uint32_t> eval_circuits() const;
  std::vector<std::uint32_t> check_circuits() const;
};

/// N = floor(2S/5).
std::uint32_t eval_count_for(std::uint32_t circuits);

/// Uniform among vectors with exactly N zeros. Requires S >= 5.
CircuitSplit select_split(std::uint32_t circuits, crypto::Prg& rng);

struct CircuitKeyPair {
  Block check_key;
  Block eval_key;

  bool operator==(const CircuitKeyPair&) const = default;
  const Block& for_bit(bool check) const { return check ? check_key : eval_key; }
};

std::vector<CircuitKeyPair> make_key_pairs(std::uint32_t circuits, unsigned label_bits,
                                           crypto::Prg& rng);

/// key' = H(key), applied before every execution after the first.
Block evolve_key(const Block& key, unsigned label_bits);
std::vector<CircuitKeyPair> evolve_keys(const std::vector<CircuitKeyPair>& keys,
                                        unsigned label_bits);
std::vector<Block> evolve_keys(const std::vector<Block>& keys, unsigned label_bits);

/// Generator side of the key OT: offers (eval_key, check_key) per circuit.
void cut_and_choose_ot_send(transport::Link& to_cloud, std::uint8_t phase,
                            const ot::ExtensionOptions& opt,
                            const std::vector<CircuitKeyPair>& keys, crypto::Prg& rng,
                            ot::OtStats& stats);
/// Cloud side: obtains the key selected by each split bit.
std::vector<Block> cut_and_choose_ot_receive(transport::Link& to_gen, std::uint8_t phase,
                                             const ot::ExtensionOptions& opt,
                                             const CircuitSplit& split, unsigned label_bits,
                                             crypto::Prg& rng, ot::OtStats& stats);

Block hash_key(const Block& key, std::uint32_t circuit, unsigned label_bits);

struct KeyHashPair {
  Block check_hash;
  Block eval_hash;
};

struct CloudKeyClaim {
  Block hash;
  bool check = false;
};

std::vector<KeyHashPair> key_hash_pairs(const std::vector<CircuitKeyPair>& keys,
                                        unsigned label_bits);

class SplitMismatchError : public Error {
 public:
  SplitMismatchError(std::uint32_t circuit, const std::string& what)
      : Error(what), circuit_(circuit) {}
  std::uint32_t circuit() const { return circuit_; }

 private:
  std::uint32_t circuit_;
};

/// Evaluator: accepts and returns the split iff every cloud hash equals the
/// generator hash selected by the claimed bit.
CircuitSplit verify_split_hashes(const std::vector<KeyHashPair>& gen_pairs,
                                 const std::vector<CloudKeyClaim>& cloud_claims);

/// Keystream encryption of a circuit package under a K-bit key. Involutive.
Bytes seal_package(const Block& key, std::uint32_t circuit, std::uint64_t execution,
                   std::uint8_t which, std::span<const std::uint8_t> data);
inline constexpr std::uint8_t kEvalPackage = 0;
inline constexpr std::uint8_t kCheckPackage = 1;

/// Per-party key storage. Generators keep both keys of every circuit; the
/// cloud keeps the selected key together with its selection bit.
struct KeyRing {
  Role role = Role::kGenerator;
  CircuitSplit split;
  std::vector<CircuitKeyPair> pairs;  // generator
  std::vector<Block> selected;        // cloud

  bool operator==(const KeyRing&) const = default;
};

/// "PGC1", role, S (4 bytes), split bitvector, key records.
Bytes encode_key_file(const KeyRing& ring, unsigned label_bits);
KeyRing decode_key_file(std::span<const std::uint8_t> data, unsigned label_bits);

}  // namespace pgc::cnc
