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

#include "pgc/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>

namespace pgc::crypto {

struct Aes128::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
};

Aes128::Aes128(const Block& key) : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_CIPHER_CTX_new();
  std::uint8_t k[16];
  key.to_bytes(k);
  if (impl_->ctx == nullptr ||
      EVP_EncryptInit_ex(impl_->ctx, EVP_aes_128_ecb(), nullptr, k, nullptr) != 1) {
    throw Error("AES context initialisation failed");
  }
  EVP_CIPHER_CTX_set_padding(impl_->ctx, 0);
}

Aes128::~Aes128() {
  if (impl_ && impl_->ctx) EVP_CIPHER_CTX_free(impl_->ctx);
}

Block Aes128::encrypt(const Block& in) const {
  Block b = in;
  encrypt(std::span<Block>(&b, 1));
  return b;
}

void Aes128::encrypt(std::span<Block> blocks) const {
  // Blocks are two little-endian words; on the supported (little-endian)
  // targets that is exactly their 16-byte serialization.
  static_assert(sizeof(Block) == 16);
  auto* p = reinterpret_cast<unsigned char*>(blocks.data());
  int outl = 0;
  if (EVP_EncryptUpdate(impl_->ctx, p, &outl, p, static_cast<int>(blocks.size() * 16)) != 1) {
    throw Error("AES encryption failed");
  }
}

Block make_tweak(Domain d, std::uint32_t circuit, std::uint64_t index) {
  return {index, (std::uint64_t{static_cast<std::uint8_t>(d)} << 56) | circuit};
}

Block gf_double(const Block& b) {
  const bool carry = (b.hi >> 63) != 0;
  Block r{b.lo << 1, (b.hi << 1) | (b.lo >> 63)};
  if (carry) r.lo ^= 0x87;
  return r;
}

namespace {

// 64x64 -> 128 carry-less multiply.
void clmul64(std::uint64_t a, std::uint64_t b, std::uint64_t& lo, std::uint64_t& hi) {
  lo = 0;
  hi = 0;
  for (int i = 0; i < 64; ++i) {
    if ((b >> i) & 1U) {
      lo ^= a << i;
      if (i != 0) hi ^= a >> (64 - i);
    }
  }
}

const Aes128& fixed_key_cipher() {
  // Public constant key; the hash is only as strong as AES as an ideal permutation.
  thread_local const Aes128 aes(Block{0x6a09e667f3bcc908ULL, 0xbb67ae8584caa73bULL});
  return aes;
}

}  // namespace

Block gf_mul(const Block& a, const Block& b) {
  std::uint64_t r[4] = {0, 0, 0, 0};
  std::uint64_t lo, hi;
  clmul64(a.lo, b.lo, lo, hi);
  r[0] ^= lo;
  r[1] ^= hi;
  clmul64(a.hi, b.hi, lo, hi);
  r[2] ^= lo;
  r[3] ^= hi;
  clmul64(a.lo, b.hi, lo, hi);
  r[1] ^= lo;
  r[2] ^= hi;
  clmul64(a.hi, b.lo, lo, hi);
  r[1] ^= lo;
  r[2] ^= hi;
  // Reduce the upper 128 bits: x^128 = x^7 + x^2 + x + 1.
  for (int w = 3; w >= 2; --w) {
    const std::uint64_t t = r[w];
    r[w - 2] ^= t ^ (t << 1) ^ (t << 2) ^ (t << 7);
    r[w - 1] ^= (t >> 63) ^ (t >> 62) ^ (t >> 57);
  }
  return {r[0], r[1]};
}

Block poly_uhf(const Block& h, std::span<const Block> values) {
  Block acc;
  for (const Block& v : values) acc = gf_mul(acc ^ v, h);
  return gf_mul(acc ^ Block{values.size(), 0}, h);
}

Block tweak_hash(const Block& a, const Block& b, const Block& tweak) {
  const Block k = gf_double(a) ^ gf_double(gf_double(b)) ^ tweak;
  return fixed_key_cipher().encrypt(k) ^ k;
}

Prg::Prg(const Block& seed) : Prg(seed, Block{}) {}

Prg::Prg(const Block& seed, const Block& nonce)
    : aes_(std::make_shared<const Aes128>(seed)), nonce_(nonce) {}

Block Prg::next_block() {
  Block in = nonce_;
  in.lo ^= counter_++;
  return aes_->encrypt(in);
}

void Prg::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (buffered_bytes_ == 0) {
      buffer_ = next_block();
      buffered_bytes_ = 16;
    }
    std::uint8_t tmp[16];
    buffer_.to_bytes(tmp);
    const std::size_t take = std::min<std::size_t>(buffered_bytes_, out.size() - pos);
    std::memcpy(out.data() + pos, tmp + (16 - buffered_bytes_), take);
    buffered_bytes_ -= static_cast<unsigned>(take);
    pos += take;
  }
}

Bytes Prg::bytes(std::size_t n) {
  Bytes b(n);
  fill(b);
  return b;
}

bool Prg::next_bit() {
  if (bits_left_ == 0) {
    bit_pool_ = next_block().lo;
    bits_left_ = 64;
  }
  const bool b = (bit_pool_ & 1U) != 0;
  bit_pool_ >>= 1;
  --bits_left_;
  return b;
}

std::uint64_t Prg::uniform(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t v = next_block().lo;
    if (v < limit) return v % bound;
  }
}

Block os_random_block() {
  std::uint8_t buf[16];
  if (RAND_bytes(buf, sizeof buf) != 1) throw Error("system randomness unavailable");
  return Block::from_bytes(buf);
}

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
}

Sha256::~Sha256() {
  if (impl_ && impl_->ctx) EVP_MD_CTX_free(impl_->ctx);
}

Sha256& Sha256::update(std::span<const std::uint8_t> data) {
  EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update(std::string_view s) {
  update_u64(s.size());
  EVP_DigestUpdate(impl_->ctx, s.data(), s.size());
  return *this;
}

Sha256& Sha256::update(const Block& b) {
  std::uint8_t tmp[16];
  b.to_bytes(tmp);
  return update(tmp);
}

Sha256& Sha256::update_u64(std::uint64_t v) {
  std::uint8_t tmp[8];
  for (int i = 0; i < 8; ++i) tmp[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
  return update(tmp);
}

Digest Sha256::finish() {
  Digest d{};
  unsigned len = 0;
  EVP_DigestFinal_ex(impl_->ctx, d.data(), &len);
  return d;
}

Digest sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }

Block digest_block(const Digest& d, unsigned bits) {
  return Block::from_bytes(std::span<const std::uint8_t>(d.data(), 16)).truncated(bits);
}

Bytes keystream(const Block& key, const Block& tweak, std::size_t len) {
  Prg prg(key, tweak);
  return prg.bytes(len);
}

}  // namespace pgc::crypto
