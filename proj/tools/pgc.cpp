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

// Command-line driver: one protocol party per process, or all three in process.

#include <iostream>

#include "CLI11.hpp"
#include "pgc/bench.hpp"
#include "pgc/programs.hpp"

using namespace pgc;

namespace {

Block parse_seed(const std::string& hex) {
  std::string h = hex.rfind("0x", 0) == 0 ? hex.substr(2) : hex;
  if (h.empty() || h.size() > 32) throw Error("--seed takes 1 to 32 hex digits");
  h.insert(h.begin(), 32 - h.size(), '0');
  const Bytes b = from_hex(h);
  return Block::from_bytes(b);
}

std::vector<std::uint32_t> parse_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    out.push_back(static_cast<std::uint32_t>(std::stoul(part)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pgc: outsourced garbled-circuit engine with reusable wire values"};
  app.require_subcommand(1);

  bench::RunConfig cfg;
  std::string role = "local", mode = "malicious", base_ot = "group";
  std::string seed, state, csv, tamper, transcripts;
  auto* run = app.add_subcommand("run", "run protocol executions");
  run->add_option("--role", role, "gen, evl, cloud, or local for all three in process")
      ->check(CLI::IsMember({"gen", "evl", "cloud", "local"}));
  run->add_option("--program", cfg.program, "program spec, e.g. millionaires:8 or keyed_db:64:8");
  run->add_option("--circuits", cfg.circuits, "number of circuits S");
  run->add_option("--security", cfg.label_bits, "label length K in bits (8-120)");
  run->add_option("--encoding", cfg.encoding_width, "XOR shares per evaluator input bit");
  run->add_option("--tag-bits", cfg.tag_bits, "output MAC tag bits");
  run->add_option("--mode", mode)->check(CLI::IsMember({"malicious", "semi"}));
  run->add_option("--base-ot", base_ot, "group, or dealer (insecure, tests only)")
      ->check(CLI::IsMember({"group", "dealer"}));
  run->add_option("--listen", cfg.listen, "host:port to accept peers on");
  run->add_option("--connect", cfg.connect, "host:port of a peer (repeatable)");
  run->add_option("--state", state, "state file (directory for --role local); default $PGC_STATE_DIR");
  run->add_flag("--fresh", cfg.fresh, "start a new chain, ignoring saved state");
  run->add_option("--trials", cfg.trials, "executions to run")->check(CLI::PositiveNumber);
  run->add_option("--csv", csv, "also write CSV rows to this file");
  run->add_option("--seed", seed, "hex seed for reproducible randomness");
  run->add_option("--gen-input", cfg.gen_input, "generator input (decimal or 0x-hex)");
  run->add_option("--evl-input", cfg.evl_input, "evaluator input (decimal or 0x-hex)");
  run->add_option("--transcripts", transcripts, "record per-link transcripts in this directory");
  run->add_option("--timeout-ms", cfg.timeout_ms, "connect timeout");
#ifdef PGC_TAMPER
  run->add_option("--tamper", tamper, "fault injection, e.g. gate-row:2 or output-flip:0:3");
#endif

  std::string wires = "64,256,1024", circuits = "5,10,20,40", bench_csv;
  unsigned bench_k = 80;
  auto* saveload = app.add_subcommand("bench-saveload", "per-bit save and load timings");
  saveload->add_option("--wires", wires, "comma-separated saved wire counts");
  saveload->add_option("--circuits", circuits, "comma-separated circuit counts S");
  saveload->add_option("--security", bench_k, "label length K");
  saveload->add_option("--csv", bench_csv, "also write CSV to this file");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "check recorded transcripts offline");
  replay->add_option("path", replay_path, "transcript file or directory")->required();

  std::string program_spec;
  auto* emit = app.add_subcommand("circuit", "print a builder program in circuit-file format");
  emit->add_option("program", program_spec, "program spec")->required();

  app.add_subcommand("programs", "list builder programs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (role != "local") cfg.role = parse_role(role);
      cfg.mode = mode == "semi" ? state::Mode::kSemiHonest : state::Mode::kMalicious;
      cfg.base_ot = base_ot == "dealer" ? ot::BaseOtKind::kDealer : ot::BaseOtKind::kGroup;
      if (!seed.empty()) cfg.seed = parse_seed(seed);
      if (!state.empty()) cfg.state_path = state;
      if (!csv.empty()) cfg.csv_path = csv;
      if (!transcripts.empty()) cfg.transcript_dir = transcripts;
      if (!tamper.empty()) cfg.tamper = protocol::Tamper::parse(tamper);
      return bench::cmd_run(cfg, std::cout, std::cerr);
    }
    if (*saveload) {
      std::optional<std::filesystem::path> out;
      if (!bench_csv.empty()) out = bench_csv;
      return bench::cmd_bench_saveload(parse_list(wires), parse_list(circuits), bench_k, out,
                                       std::cout, std::cerr);
    }
    if (*replay) return bench::cmd_replay(replay_path, std::cout);
    if (*emit) {
      std::cout << circuit::emit_circuit(
          circuit::build_program(circuit::ProgramSpec::parse(program_spec)));
      return 0;
    }
    for (const auto& n : circuit::program_names()) std::cout << n << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "pgc: " << e.what() << '\n';
    return bench::kExitAbort;
  }
}
