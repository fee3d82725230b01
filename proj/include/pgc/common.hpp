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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pgc {

using Bytes = std::vector<std::uint8_t>;

/// One value per element, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// 128-bit container for wire labels, keys and seeds. Only the low K bits of a
/// label are significant; bit i lives in byte i/8, position i%8.
struct Block {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  constexpr Block() = default;
  constexpr Block(std::uint64_t l, std::uint64_t h) : lo(l), hi(h) {}

  constexpr Block operator^(const Block& o) const { return {lo ^ o.lo, hi ^ o.hi}; }
  constexpr Block& operator^=(const Block& o) {
    lo ^= o.lo;
    hi ^= o.hi;
    return *this;
  }
  constexpr Block operator&(const Block& o) const { return {lo & o.lo, hi & o.hi}; }
  constexpr bool operator==(const Block&) const = default;

  constexpr bool bit(unsigned i) const {
    return i < 64 ? ((lo >> i) & 1U) != 0 : ((hi >> (i - 64)) & 1U) != 0;
  }
  constexpr void set_bit(unsigned i, bool v) {
    std::uint64_t& w = i < 64 ? lo : hi;
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    w = v ? (w | m) : (w & ~m);
  }
  constexpr bool is_zero() const { return lo == 0 && hi == 0; }

  /// Low `bits` bits set.
  static constexpr Block mask(unsigned bits) {
    if (bits >= 128) return {~std::uint64_t{0}, ~std::uint64_t{0}};
    if (bits >= 64) {
      return {~std::uint64_t{0}, bits == 64 ? 0 : (~std::uint64_t{0} >> (128 - bits))};
    }
    return {bits == 0 ? 0 : (~std::uint64_t{0} >> (64 - bits)), 0};
  }
  constexpr Block truncated(unsigned bits) const { return *this & mask(bits); }

  void to_bytes(std::span<std::uint8_t> out) const;
  static Block from_bytes(std::span<const std::uint8_t> in);
};

inline constexpr std::size_t bytes_for_bits(std::size_t bits) { return (bits + 7) / 8; }

/// Pack 0/1 values little-endian within each byte.
Bytes pack_bits(std::span<const std::uint8_t> bits);
Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count);
Bits bits_from_uint(std::uint64_t v, std::size_t width);
std::uint64_t uint_from_bits(std::span<const std::uint8_t> bits);
std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

enum class Role : std::uint8_t { kGenerator = 1, kEvaluator = 2, kCloud = 3 };

std::string_view role_name(Role r);
/// Accepts "gen", "evl", "cloud" and the long names.
Role parse_role(std::string_view s);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: circuit text, serialized records, frames, state files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Big-endian serializer used for protocol payloads and state files.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  /// Block serialized as its low `bits` bits, ceil(bits/8) bytes.
  void block(const Block& b, unsigned bits);
  void bits(std::span<const std::uint8_t> bits);
  void var_bytes(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    bytes(b);
  }

  const Bytes& data() const& { return buf_; }
  Bytes take() && { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::span<const std::uint8_t> bytes(std::size_t n);
  Block block(unsigned bits);
  Bits bits(std::size_t count);
  Bytes var_bytes();

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  /// Throws FormatError unless every byte was consumed.
  void expect_done(std::string_view what) const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace pgc
