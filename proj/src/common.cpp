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

#include "pgc/common.hpp"

#include <algorithm>

namespace pgc {

void Block::to_bytes(std::span<std::uint8_t> out) const {
  for (std::size_t i = 0; i < out.size() && i < 16; ++i) {
    const std::uint64_t w = i < 8 ? lo : hi;
    out[i] = static_cast<std::uint8_t>(w >> (8 * (i % 8)));
  }
}

Block Block::from_bytes(std::span<const std::uint8_t> in) {
  Block b;
  for (std::size_t i = 0; i < in.size() && i < 16; ++i) {
    std::uint64_t& w = i < 8 ? b.lo : b.hi;
    w |= std::uint64_t{in[i]} << (8 * (i % 8));
  }
  return b;
}

Bytes pack_bits(std::span<const std::uint8_t> bits) {
  Bytes out(bytes_for_bits(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
  }
  return out;
}

Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
  Bits out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (bytes[i / 8] >> (i % 8)) & 1U;
  return out;
}

Bits bits_from_uint(std::uint64_t v, std::size_t width) {
  Bits out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = i < 64 ? ((v >> i) & 1U) : 0;
  return out;
}

std::uint64_t uint_from_bits(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size() && i < 64; ++i) {
    if (bits[i]) v |= std::uint64_t{1} << i;
  }
  return v;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw FormatError("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int h = nibble(hex[2 * i]);
    const int l = nibble(hex[2 * i + 1]);
    if (h < 0 || l < 0) throw FormatError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(h * 16 + l);
  }
  return out;
}

void ByteWriter::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::block(const Block& b, unsigned bits) {
  std::uint8_t tmp[16];
  b.to_bytes(tmp);
  buf_.insert(buf_.end(), tmp, tmp + bytes_for_bits(bits));
}

void ByteWriter::bits(std::span<const std::uint8_t> bits) {
  const Bytes packed = pack_bits(bits);
  bytes(packed);
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw FormatError("truncated input: need " + std::to_string(n) + " bytes, have " +
                      std::to_string(remaining()));
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  need(n);
  auto s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

Block ByteReader::block(unsigned bits) {
  const Block b = Block::from_bytes(bytes(bytes_for_bits(bits)));
  if (!(b.truncated(bits) == b)) throw FormatError("label has bits set beyond its width");
  return b;
}

Bits ByteReader::bits(std::size_t count) { return unpack_bits(bytes(bytes_for_bits(count)), count); }

Bytes ByteReader::var_bytes() {
  const std::uint32_t n = u32();
  auto s = bytes(n);
  return Bytes(s.begin(), s.end());
}

void ByteReader::expect_done(std::string_view what) const {
  if (!done()) {
    throw FormatError(std::string(what) + ": " + std::to_string(remaining()) + " trailing bytes");
  }
}


std::string_view role_name(Role r) {
  switch (r) {
    case Role::kGenerator:
      return "generator";
    case Role::kEvaluator:
      return "evaluator";
    case Role::kCloud:
      return "cloud";
  }
  return "unknown";
}

Role parse_role(std::string_view s) {
  if (s == "gen" || s == "generator") return Role::kGenerator;
  if (s == "evl" || s == "evaluator") return Role::kEvaluator;
  if (s == "cloud") return Role::kCloud;
  throw Error("unknown role '" + std::string(s) + "'");
}

}  // namespace pgc
