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
#include <filesystem>
#include <vector>

#include "pgc/common.hpp"
#include "pgc/cut_and_choose.hpp"
#include "pgc/partial.hpp"

namespace pgc::state {

enum class Mode : std::uint8_t { kMalicious = 0, kSemiHonest = 1 };

/// Per-party record carried from one execution of a chain to the next.
struct SavedState {
  Role role = Role::kGenerator;
  Mode mode = Mode::kMalicious;
  std::uint64_t next_execution = 0;  // t of the execution that will consume it
  std::uint32_t circuits = 0;        // S
  unsigned label_bits = 80;          // K
  bool poisoned = false;
  cnc::KeyRing keys;
  std::vector<std::vector<partial::SavedWireRecord>> wires;  // [circuit][saved wire]

  bool operator==(const SavedState&) const = default;
  std::size_t wire_count() const { return wires.empty() ? 0 : wires.front().size(); }
  const cnc::CircuitSplit& split() const { return keys.split; }
};

inline constexpr std::uint8_t kStateVersion = 1;

class StateError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Throws StateError describing the first violated invariant.
void validate_state(const SavedState& s);

/// "PGCS", version, role, mode, t, S, K, poisoned flag, split bitvector,
/// key section (embedded key file), wire section.
Bytes encode_state(const SavedState& s);
SavedState decode_state(std::span<const std::uint8_t> data);

void persist_state(const std::filesystem::path& path, const SavedState& s);
SavedState load_state(const std::filesystem::path& path);

/// Sets the poisoned flag in an existing state file, if there is one.
void poison_state_file(const std::filesystem::path& path);

}  // namespace pgc::state
