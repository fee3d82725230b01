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
#include <utility>
#include <vector>

#include "pgc/common.hpp"
#include "pgc/crypto.hpp"
#include "pgc/transport.hpp"

namespace pgc::ot {

using transport::Link;

enum class BaseOtKind : std::uint8_t {
  kGroup = 0,   // simplest OT over ristretto255
  kDealer = 1,  // INSECURE: sender reveals both messages; deterministic tests only
};

/// Call and cost counters; one instance per party per execution.
struct OtStats {
  std::uint64_t base_sessions = 0;
  std::uint64_t base_transfers = 0;
  std::uint64_t public_key_ops = 0;
  std::uint64_t extension_sessions = 0;
  std::uint64_t extended_transfers = 0;
  std::uint64_t outsourced_ot_calls = 0;
  std::uint64_t cut_and_choose_ot_calls = 0;

  OtStats& operator+=(const OtStats& o);
};

class OtError : public Error {
 public:
  using Error::Error;
};

/// Raised by the extension sender when the receiver's matrix fails the
/// consistency check.
class OtConsistencyError : public OtError {
 public:
  using OtError::OtError;
};

// Frame types used by this module.
inline constexpr std::uint8_t kMsgBaseSetup = 0x20;
inline constexpr std::uint8_t kMsgBaseChoice = 0x21;
inline constexpr std::uint8_t kMsgBaseCipher = 0x22;
inline constexpr std::uint8_t kMsgExtMatrix = 0x23;
inline constexpr std::uint8_t kMsgExtChallenge = 0x24;
inline constexpr std::uint8_t kMsgExtResponse = 0x25;
inline constexpr std::uint8_t kMsgExtCipher = 0x26;
inline constexpr std::uint8_t kMsgOotCipher = 0x27;
inline constexpr std::uint8_t kMsgOotForward = 0x28;

// ---------------------------------------------------------------------------
// Evaluator input encoding.

struct EncodedInput {
  Bits true_bits;
  Bits shares;  // width shares per true bit, grouped per bit
  unsigned width = 1;
};

EncodedInput encode_input(std::span<const std::uint8_t> bits, unsigned width, crypto::Prg& rng);
Bits decode_input(std::span<const std::uint8_t> shares, unsigned width);

// ---------------------------------------------------------------------------
// 1-of-2 OT on 128-bit messages.

void base_ot_send(Link& link, std::uint8_t phase, BaseOtKind kind,
                  std::span<const std::pair<Block, Block>> pairs, crypto::Prg& rng,
                  OtStats& stats);
std::vector<Block> base_ot_receive(Link& link, std::uint8_t phase, BaseOtKind kind,
                                   std::span<const std::uint8_t> choices, crypto::Prg& rng,
                                   OtStats& stats);

struct ExtensionOptions {
  unsigned base_count = 80;  // = K
  BaseOtKind base_kind = BaseOtKind::kGroup;
  /// Receiver-side fault injection: feed inconsistent choice bits into half
  /// of the matrix columns.
  bool corrupt_columns = false;
};

/// IKNP extension with a KOS-style correlation check. Only base_count
/// public-key transfers are performed, in the reverse direction.
void extend_send(Link& link, std::uint8_t phase, const ExtensionOptions& opt,
                 std::span<const std::pair<Block, Block>> pairs, crypto::Prg& rng,
                 OtStats& stats);
std::vector<Block> extend_receive(Link& link, std::uint8_t phase, const ExtensionOptions& opt,
                                  std::span<const std::uint8_t> choices, crypto::Prg& rng,
                                  OtStats& stats);

// ---------------------------------------------------------------------------
// Outsourced OT: the generator offers seed pairs, the evaluator chooses and
// the cloud receives the chosen seeds. One call per execution.

void oot_generator(Link& to_evl, Link& to_cloud, std::uint8_t phase,
                   const ExtensionOptions& opt, std::span<const std::pair<Block, Block>> seeds,
                   unsigned label_bits, crypto::Prg& rng, OtStats& stats);
void oot_evaluator(Link& to_gen, Link& to_cloud, std::uint8_t phase,
                   const ExtensionOptions& opt, std::span<const std::uint8_t> choices,
                   crypto::Prg& rng, OtStats& stats);
std::vector<Block> oot_cloud(Link& from_gen, Link& from_evl, std::uint8_t phase,
                             std::size_t count, unsigned label_bits, OtStats& stats);

// ---------------------------------------------------------------------------
// Evaluator-input values and their commitments.

/// hash(IKey_i, seed_j): the value that selects circuit i's label for
/// encoded evaluator bit j. Argument order is (ikey, seed) on every side.
Block evl_input_value(const Block& ikey, const Block& seed, std::uint32_t circuit,
                      std::uint32_t j, unsigned label_bits);
/// Opening randomness for the commitment to that value.
Block evl_input_opening(const Block& ikey, const Block& seed, std::uint32_t circuit,
                        std::uint32_t j, unsigned label_bits);

using Commitment = std::array<std::uint8_t, 16>;

Commitment commit_label(const Block& value, const Block& opening, std::uint32_t circuit,
                        std::uint32_t j);
bool verify_opening(const Commitment& c, const Block& value, const Block& opening,
                    std::uint32_t circuit, std::uint32_t j);

}  // namespace pgc::ot
