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

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "pgc/common.hpp"

namespace pgc::crypto {

/// AES-128 in ECB mode under a fixed key. Not copyable (owns an OpenSSL context).
class Aes128 {
 public:
  explicit Aes128(const Block& key);
  ~Aes128();
  Aes128(const Aes128&) = delete;
  Aes128& operator=(const Aes128&) = delete;

  Block encrypt(const Block& in) const;
  void encrypt(std::span<Block> blocks) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Domain tags keep hashes from different protocol roles apart.
enum class Domain : std::uint8_t {
  kGateRow = 1,
  kPartial = 2,
  kEvlInput = 3,
  kGenInput = 4,
  kOutputDecode = 5,
  kPpLocation = 6,
  kOtRow = 7,
  kContext = 8,
  kKeystream = 9,
};

Block make_tweak(Domain d, std::uint32_t circuit, std::uint64_t index);

/// GF(2^128) doubling (multiplication by x).
Block gf_double(const Block& b);
/// Carry-less product in GF(2^128) modulo x^128 + x^7 + x^2 + x + 1.
Block gf_mul(const Block& a, const Block& b);

/// Polynomial universal hash over GF(2^128) keyed by h; the length is
/// absorbed last so vectors of different lengths do not collide trivially.
Block poly_uhf(const Block& h, std::span<const Block> values);

/// Tweakable correlation-robust hash from a fixed-key block cipher:
/// H(a, b, T) = pi(K) ^ K with K = 2a ^ 4b ^ T.
Block tweak_hash(const Block& a, const Block& b, const Block& tweak);

/// AES-CTR keystream generator keyed by a seed block. Deterministic.
class Prg {
 public:
  explicit Prg(const Block& seed);
  Prg(const Block& seed, const Block& nonce);

  Block next_block();
  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  bool next_bit();
  /// Uniform in [0, bound), bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  /// Random block with only the low `bits` bits possibly set.
  Block label(unsigned bits) { return next_block().truncated(bits); }

 private:
  std::shared_ptr<const Aes128> aes_;
  Block nonce_;
  std::uint64_t counter_ = 0;
  Block buffer_;
  unsigned buffered_bytes_ = 0;
  std::uint64_t bit_pool_ = 0;
  unsigned bits_left_ = 0;
};

/// Seed from the operating system CSPRNG.
Block os_random_block();

using Digest = std::array<std::uint8_t, 32>;

class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> data);
  Sha256& update(std::string_view s);
  Sha256& update(const Block& b);
  Sha256& update_u64(std::uint64_t v);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Digest sha256(std::span<const std::uint8_t> data);

/// First 16 bytes of a digest as a block, truncated to `bits`.
Block digest_block(const Digest& d, unsigned bits = 128);

/// `len` keystream bytes bound to (key, tweak).
Bytes keystream(const Block& key, const Block& tweak, std::size_t len);

}  // namespace pgc::crypto
