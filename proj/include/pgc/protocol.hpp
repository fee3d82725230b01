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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgc/circuit.hpp"
#include "pgc/common.hpp"
#include "pgc/cut_and_choose.hpp"
#include "pgc/ot.hpp"
#include "pgc/state.hpp"
#include "pgc/transport.hpp"

namespace pgc::protocol {

using state::Mode;
using transport::AbortKind;
using transport::Link;

/// Parameters all three parties must agree on for one execution.
struct ProtocolConfig {
  circuit::CircuitIR circuit;  // program circuit before augmentation
  std::uint32_t circuits = 5;  // S
  unsigned label_bits = 80;    // K
  unsigned encoding_width = 8;
  std::uint32_t tag_bits = 32;
  Mode mode = Mode::kMalicious;
  ot::BaseOtKind base_ot = ot::BaseOtKind::kGroup;
  std::uint64_t execution = 0;  // t; also the frame execution id

  /// Digest exchanged in the first message; any disagreement aborts.
  crypto::Digest digest() const;
};

/// Fault injection for tests. Each party applies only the kinds it owns.
struct Tamper {
  enum class Kind : std::uint8_t {
    kNone,
    kGateRow,        // generator: corrupt one AND gate's rows
    kPartialRow,     // generator: flip a bit in one partial input gate
    kTransform,      // generator: perturb R_i
    kWitness,        // generator: flip one witness value in an evaluation package
    kEvlSwap,        // generator: swap the 0/1 evaluator-input values after committing
    kWrongFunction,  // generator: garble NAND in place of one AND gate
    kKeyHashSwap,    // generator: swap one key-hash pair sent to the evaluator
    kSplitLie,       // cloud: claim the wrong selection bit for one circuit
    kOutputFlip,     // cloud: flip one output bit after the vote
    kOtColumns,      // evaluator: inconsistent OT extension matrix
  };
  Kind kind = Kind::kNone;
  std::int32_t circuit = -1;  // -1: every circuit
  std::uint32_t index = 0;    // gate, wire or bit index within the target

  bool hits(std::uint32_t i) const { return circuit < 0 || static_cast<std::uint32_t>(circuit) == i; }
  bool is(Kind k) const { return kind == k; }

  /// "gate-row:CIRCUIT[:INDEX]", "partial-row:all", "output-flip:0:3", ...
  static Tamper parse(const std::string& text);
  std::string to_string() const;
};

struct AbortInfo {
  AbortKind kind = AbortKind::kProtocol;
  std::uint8_t phase = 0;
  std::string detail;
  bool remote = false;
};

struct PartyReport {
  Role role = Role::kGenerator;
  bool ok = false;
  std::optional<AbortInfo> abort;
  Bits output;  // verified data output (generator/evaluator)
  ot::OtStats ot;
  std::map<std::string, std::uint64_t> bytes_sent;
  std::map<std::string, std::uint64_t> bytes_received;
  double millis = 0;
  std::size_t and_gates = 0;  // per circuit, after augmentation

  // Cloud diagnostics.
  std::uint64_t gates_compared = 0;
  std::uint64_t gate_mismatches = 0;
  std::uint32_t invalid_eval_circuits = 0;
  std::optional<cnc::CircuitSplit> split;  // cloud and evaluator

  std::uint64_t total_sent() const;
  std::uint64_t total_received() const;
};

struct PartyParams {
  Bits input;                            // generator/evaluator data bits
  std::optional<state::SavedState> prior;  // generator/cloud, t >= 1
  Block seed;                            // PRG seed for all local randomness
  Tamper tamper;
};

struct PartyResult {
  PartyReport report;
  std::optional<state::SavedState> next_state;  // generator/cloud on success
};

PartyResult run_generator(const ProtocolConfig& cfg, Link& evl, Link& cloud,
                          const PartyParams& params);
PartyResult run_evaluator(const ProtocolConfig& cfg, Link& gen, Link& cloud,
                          const PartyParams& params);
PartyResult run_cloud(const ProtocolConfig& cfg, Link& gen, Link& evl, const PartyParams& params);

/// Per-bit strict majority; nullopt on a tie or when no circuit is valid.
std::optional<Bits> majority_vote(const std::vector<Bits>& outputs);

/// Unpads `received` and checks the in-circuit tag. Throws ProtocolAbort
/// (cheating cloud) on a mismatch. Returns the data bits.
Bits verify_output(std::span<const std::uint8_t> received, std::span<const std::uint8_t> pad,
                   std::span<const std::uint8_t> mac_key, std::size_t data_bits,
                   std::uint32_t tag_bits);

// ---------------------------------------------------------------------------
// In-process three-party execution.

struct ExecutionResult {
  PartyResult gen;
  PartyResult evl;
  PartyResult cloud;

  bool ok() const { return gen.report.ok && evl.report.ok && cloud.report.ok; }
  /// First abort observed locally (not relayed), if any.
  std::optional<AbortInfo> abort() const;
  bool cheating_detected() const;
};

struct LocalRunOptions {
  Block gen_seed;
  Block evl_seed;
  Block cloud_seed;
  Tamper tamper;
  std::optional<std::filesystem::path> transcript_dir;
};

ExecutionResult run_local(const ProtocolConfig& cfg, const Bits& gen_input, const Bits& evl_input,
                          std::optional<state::SavedState> gen_prior,
                          std::optional<state::SavedState> cloud_prior,
                          const LocalRunOptions& opt);

struct ChainOptions {
  std::uint32_t circuits = 5;
  unsigned label_bits = 80;
  unsigned encoding_width = 8;
  std::uint32_t tag_bits = 32;
  Mode mode = Mode::kMalicious;
  ot::BaseOtKind base_ot = ot::BaseOtKind::kGroup;
  std::optional<Block> seed;  // deterministic when set
  std::optional<std::filesystem::path> transcript_dir;
};

/// Runs successive executions of one computation chain in process, carrying
/// generator and cloud state from each execution to the next.
class LocalChain {
 public:
  explicit LocalChain(ChainOptions opt);

  ExecutionResult run(const circuit::CircuitIR& c, const Bits& gen_input, const Bits& evl_input,
                      const Tamper& tamper = {});

  std::uint64_t next_execution() const { return next_; }
  const std::optional<state::SavedState>& gen_state() const { return gen_state_; }
  const std::optional<state::SavedState>& cloud_state() const { return cloud_state_; }
  void set_states(std::optional<state::SavedState> gen, std::optional<state::SavedState> cloud,
                  std::uint64_t next);
  const ChainOptions& options() const { return opt_; }

 private:
  Block party_seed(Role r) const;

  ChainOptions opt_;
  std::uint64_t next_ = 0;
  std::uint64_t nonce_ = 0;
  std::optional<state::SavedState> gen_state_;
  std::optional<state::SavedState> cloud_state_;
};

}  // namespace pgc::protocol
