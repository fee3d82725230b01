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

#include "pgc/state.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace pgc::state {

using partial::SavedWireRecord;

namespace {

constexpr std::uint8_t kMagic[4] = {'P', 'G', 'C', 'S'};

void fail(const std::string& why) { throw StateError("saved state: " + why); }

}  // namespace

void validate_state(const SavedState& s) {
  if (s.role == Role::kEvaluator) fail("the evaluator keeps no state");
  if (s.label_bits < garbling::kMinLabelBits || s.label_bits > garbling::kMaxLabelBits) {
    fail("label width out of range");
  }
  if (s.circuits == 0) fail("zero circuits");
  if (s.keys.split.size() != s.circuits) fail("split size differs from S");
  if (s.keys.role != s.role) fail("key section role differs from header role");
  if (s.mode == Mode::kSemiHonest) {
    if (s.circuits != 1) fail("semi-honest chains use a single circuit");
  } else {
    const auto& split = s.keys.split;
    if (s.role == Role::kCloud && split.eval_count() != cnc::eval_count_for(s.circuits)) {
      fail("split has the wrong number of evaluation circuits");
    }
    if (s.role == Role::kGenerator && s.keys.pairs.size() != s.circuits) fail("missing keys");
    if (s.role == Role::kCloud && s.keys.selected.size() != s.circuits) fail("missing keys");
  }
  if (s.wires.size() != s.circuits) fail("wire section does not cover every circuit");
  const std::size_t n = s.wire_count();
  for (std::uint32_t i = 0; i < s.circuits; ++i) {
    if (s.wires[i].size() != n) fail("circuits disagree on the saved wire count");
    const bool needs_both =
        s.role == Role::kGenerator || (s.mode == Mode::kMalicious && s.keys.split.is_check(i));
    for (const auto& rec : s.wires[i]) {
      if (needs_both ? !rec.has_both() : !rec.has_x()) {
        fail("circuit " + std::to_string(i) + " has an incomplete label record");
      }
      if (rec.slot0.truncated(s.label_bits) != rec.slot0 ||
          rec.slot1.truncated(s.label_bits) != rec.slot1) {
        fail("label wider than K");
      }
    }
  }
}

Bytes encode_state(const SavedState& s) {
  validate_state(s);
  ByteWriter w;
  w.bytes(kMagic);
  w.u8(kStateVersion);
  w.u8(static_cast<std::uint8_t>(s.role));
  w.u8(static_cast<std::uint8_t>(s.mode));
  w.u64(s.next_execution);
  w.u32(s.circuits);
  w.u8(static_cast<std::uint8_t>(s.label_bits));
  w.u8(s.poisoned ? 1 : 0);
  w.bits(s.keys.split.selection);
  if (s.mode == Mode::kMalicious) {
    w.var_bytes(cnc::encode_key_file(s.keys, s.label_bits));
  } else {
    w.u32(0);
  }
  for (const auto& circuit : s.wires) {
    w.u32(static_cast<std::uint32_t>(circuit.size()));
    for (const auto& rec : circuit) {
      w.u8(rec.flags);
      w.block(rec.slot0, s.label_bits);
      w.block(rec.slot1, s.label_bits);
    }
  }
  return std::move(w).take();
}

SavedState decode_state(std::span<const std::uint8_t> data) {
  try {
    ByteReader r(data);
    const auto magic = r.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic)) fail("bad magic");
    const std::uint8_t version = r.u8();
    if (version != kStateVersion) {
      fail("version " + std::to_string(version) + " is not supported (expected " +
           std::to_string(kStateVersion) + ")");
    }
    SavedState s;
    const std::uint8_t role = r.u8();
    if (role < 1 || role > 3) fail("bad role");
    s.role = static_cast<Role>(role);
    const std::uint8_t mode = r.u8();
    if (mode > 1) fail("bad mode");
    s.mode = static_cast<Mode>(mode);
    s.next_execution = r.u64();
    s.circuits = r.u32();
    if (s.circuits == 0 || s.circuits > (1U << 16)) fail("implausible circuit count");
    s.label_bits = r.u8();
    if (s.label_bits < garbling::kMinLabelBits || s.label_bits > garbling::kMaxLabelBits) {
      fail("label width out of range");
    }
    s.poisoned = r.u8() != 0;
    const Bits split = r.bits(s.circuits);
    const Bytes key_file = r.var_bytes();
    if (s.mode == Mode::kMalicious) {
      s.keys = cnc::decode_key_file(key_file, s.label_bits);
      if (s.keys.split.selection != split) fail("key file split differs from header split");
    } else {
      if (!key_file.empty()) fail("semi-honest state carries keys");
      s.keys.role = s.role;
      s.keys.split.selection = split;
    }
    for (std::uint32_t i = 0; i < s.circuits; ++i) {
      const std::uint32_t n = r.u32();
      if (n > r.remaining()) fail("wire count exceeds file size");
      std::vector<SavedWireRecord> recs(n);
      for (auto& rec : recs) {
        rec.flags = r.u8();
        if ((rec.flags & ~0x07U) != 0) fail("unknown label flags");
        rec.slot0 = r.block(s.label_bits);
        rec.slot1 = r.block(s.label_bits);
      }
      s.wires.push_back(std::move(recs));
    }
    r.expect_done("saved state");
    validate_state(s);
    return s;
  } catch (const StateError&) {
    throw;
  } catch (const FormatError& e) {
    throw StateError(std::string("saved state is corrupt: ") + e.what());
  }
}

void persist_state(const std::filesystem::path& path, const SavedState& s) {
  const Bytes data = encode_state(s);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

SavedState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateError("no prior execution: cannot open " + path.string());
  const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_state(data);
}

void poison_state_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  SavedState s = load_state(path);
  s.poisoned = true;
  persist_state(path, s);
}

}  // namespace pgc::state
