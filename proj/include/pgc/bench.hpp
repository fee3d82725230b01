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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pgc/protocol.hpp"

namespace pgc::bench {

/// One party's (or, with `local`, all three parties') view of a run.
struct RunConfig {
  std::optional<Role> role;  // empty: all three parties in process
  std::string program = "millionaires:8";
  std::uint32_t circuits = 5;
  unsigned label_bits = 80;
  unsigned encoding_width = 8;
  std::uint32_t tag_bits = 32;
  state::Mode mode = state::Mode::kMalicious;
  ot::BaseOtKind base_ot = ot::BaseOtKind::kGroup;
  std::optional<std::string> listen;
  std::vector<std::string> connect;
  std::optional<std::filesystem::path> state_path;  // file, or directory for local runs
  bool fresh = false;                               // ignore any saved state
  std::uint32_t trials = 1;
  std::optional<std::filesystem::path> csv_path;
  std::optional<Block> seed;
  std::optional<std::string> gen_input;  // decimal or 0x-hex, little-endian bit order
  std::optional<std::string> evl_input;
  protocol::Tamper tamper;
  std::optional<std::filesystem::path> transcript_dir;
  int timeout_ms = 30000;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitAbort = 1;
inline constexpr int kExitCheating = 3;

/// Fixed CSV header; every successful run writes exactly `trials` rows.
const std::string& csv_header();

/// "13" or "0x0d" to `width` bits, least significant first.
Bits parse_input(const std::string& text, std::size_t width);
std::string bits_to_hex(std::span<const std::uint8_t> bits);

struct TrialRow {
  std::uint32_t trial = 0;
  std::string role;
  std::uint64_t execution = 0;
  bool ok = false;
  std::optional<protocol::AbortInfo> abort;
  double millis = 0;
  // Per party: bytes sent and received, when that party ran here.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> gen_bytes, evl_bytes, cloud_bytes;
  std::size_t and_gates = 0;
  ot::OtStats ot;
  std::uint64_t gates_compared = 0;
  std::uint64_t gate_mismatches = 0;
  Bits gen_output, evl_output;
};

std::string csv_row(const RunConfig& cfg, const TrialRow& row);

/// Runs `trials` executions and writes CSV rows to `csv` (and the file in
/// cfg.csv_path, if set). Returns a process exit code.
int cmd_run(const RunConfig& cfg, std::ostream& csv, std::ostream& log);

// ---------------------------------------------------------------------------
// Save/load microbenchmark.

struct SaveLoadRow {
  std::uint32_t wires = 0;
  std::uint32_t circuits = 0;
  double save_ms = 0;  // per save of the whole state
  double load_ms = 0;
  double save_us_per_bit() const;
  double load_us_per_bit() const;
};

/// Save is Phase-7 work: collecting saved labels, encoding, writing the
/// file. Load is the next execution's work: reading, decoding and building
/// the partial input gates.
std::vector<SaveLoadRow> bench_saveload(const std::vector<std::uint32_t>& wire_counts,
                                        const std::vector<std::uint32_t>& circuit_counts,
                                        unsigned label_bits, const std::filesystem::path& scratch,
                                        double min_batch_ms = 20.0);

/// Trend checks: load > save per row, and per wire count both times lie
/// within 2x of a least-squares line in S. Returns the violations.
std::vector<std::string> check_saveload_trend(const std::vector<SaveLoadRow>& rows);

const std::string& saveload_csv_header();
std::string saveload_csv_row(const SaveLoadRow& r);

int cmd_bench_saveload(const std::vector<std::uint32_t>& wire_counts,
                       const std::vector<std::uint32_t>& circuit_counts, unsigned label_bits,
                       const std::optional<std::filesystem::path>& csv_path, std::ostream& out,
                       std::ostream& log);

/// Replays one transcript file or every *.bin file under a directory.
int cmd_replay(const std::filesystem::path& path, std::ostream& out);

}  // namespace pgc::bench
