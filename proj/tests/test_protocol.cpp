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

#include "doctest.h"

#include <filesystem>
#include <thread>

#include "pgc/programs.hpp"
#include "pgc/protocol.hpp"

using namespace pgc;
using namespace pgc::protocol;

namespace {

ChainOptions fast(std::uint32_t s = 5, std::uint64_t seed = 7) {
  ChainOptions o;
  o.circuits = s;
  o.base_ot = ot::BaseOtKind::kDealer;
  o.seed = Block{seed, 9};
  return o;
}

std::string why(const ExecutionResult& r) { return r.abort() ? r.abort()->detail : "ok"; }

// The first check circuit and the first evaluation circuit of a chain's split.
std::pair<std::uint32_t, std::uint32_t> split_of(const ExecutionResult& r) {
  const auto& s = *r.cloud.report.split;
  return {s.check_circuits().front(), s.eval_circuits().front()};
}

}  // namespace

TEST_CASE("millionaires run matches the simulator") {
  const auto c = circuit::millionaires(4);
  auto opt = fast();
  opt.base_ot = ot::BaseOtKind::kGroup;
  LocalChain chain(opt);
  const Bits a = bits_from_uint(9, 4), b = bits_from_uint(5, 4);
  const auto r = chain.run(c, a, b);
  INFO(why(r));
  REQUIRE(r.ok());
  const auto expect = circuit::simulate_plaintext(c, a, b, {});
  CHECK(r.evl.report.output == expect.evl);
  CHECK(r.gen.report.output == expect.gen);
  CHECK(r.cloud.report.gate_mismatches == 0);
  CHECK(r.cloud.report.gates_compared > 0);
  CHECK(r.gen.report.ot.public_key_ops > 0);
}

TEST_CASE("keyed database is reused through saved wires") {
  LocalChain chain(fast());
  Bits db;
  for (std::uint32_t e = 0; e < 8; ++e) {
    const Bits v = bits_from_uint(e * 37 + 3, 8);
    db.insert(db.end(), v.begin(), v.end());
  }
  auto r = chain.run(circuit::keyed_db(8, 8), bits_from_uint(2, 3), db);
  INFO(why(r));
  REQUIRE(r.ok());
  CHECK(uint_from_bits(r.gen.report.output) == 2 * 37 + 3);
  for (std::uint64_t key : {5u, 0u, 7u}) {
    r = chain.run(circuit::keyed_db_saved(8, 8), bits_from_uint(key, 3), {});
    INFO(why(r));
    REQUIRE(r.ok());
    CHECK(uint_from_bits(r.gen.report.output) == (key * 37 + 3) % 256);
    CHECK(r.cloud.report.ot.cut_and_choose_ot_calls == 0);
  }
  CHECK(chain.next_execution() == 4);
}

TEST_CASE("counter chain in both modes") {
  for (Mode mode : {Mode::kMalicious, Mode::kSemiHonest}) {
    auto opt = fast(mode == Mode::kMalicious ? 5 : 1);
    opt.mode = mode;
    LocalChain chain(opt);
    REQUIRE(chain.run(circuit::counter_init(4), {}, bits_from_uint(13, 4)).ok());
    for (std::uint64_t step = 1; step <= 4; ++step) {
      const auto r = chain.run(circuit::counter_increment(4), {}, {});
      INFO(why(r));
      REQUIRE(r.ok());
      CHECK(uint_from_bits(r.evl.report.output) == (13 + step) % 16);
    }
  }
}

TEST_CASE("map start, set, collision and get") {
  LocalChain chain(fast());
  const std::uint32_t cells = 8;
  const auto ib = circuit::index_bits(cells);
  auto set = [&](std::uint64_t user, std::uint64_t cell) {
    Bits in = bits_from_uint(user, 8);
    const Bits idx = bits_from_uint(cell, ib);
    in.insert(in.end(), idx.begin(), idx.end());
    const auto r = chain.run(circuit::map_set(cells), {}, in);
    REQUIRE(r.ok());
    return uint_from_bits(r.evl.report.output);
  };
  auto get = [&](std::uint64_t cell) {
    const auto r = chain.run(circuit::map_get(cells), {}, bits_from_uint(cell, ib));
    REQUIRE(r.ok());
    return uint_from_bits(r.evl.report.output);
  };
  REQUIRE(chain.run(circuit::map_start(cells), Bits{1}, {}).ok());
  CHECK(get(3) == 0);
  CHECK(set(5, 3) == 0);
  CHECK(get(3) == 5);
  CHECK(set(7, 3) == 5);  // occupied: no overwrite
  CHECK(get(3) == 5);
  CHECK(set(5, 6) == 0);  // move clears the old cell
  CHECK(get(3) == 0);
  CHECK(get(6) == 5);
}

TEST_CASE("tampering on a check circuit is detected") {
  LocalChain probe(fast());
  const auto c = circuit::millionaires(3);
  const auto honest = probe.run(c, bits_from_uint(1, 3), bits_from_uint(2, 3));
  REQUIRE(honest.ok());
  const auto [check, eval] = split_of(honest);

  auto expect_cheat = [&](const std::string& spec, AbortKind kind) {
    LocalChain chain(fast());
    const auto r = chain.run(c, bits_from_uint(1, 3), bits_from_uint(2, 3), Tamper::parse(spec));
    INFO(spec << ": " << why(r));
    REQUIRE_FALSE(r.ok());
    CHECK(r.abort()->kind == kind);
    CHECK(r.cheating_detected());
  };
  expect_cheat("gate-row:" + std::to_string(check), AbortKind::kCheatGenerator);
  expect_cheat("wrong-function:" + std::to_string(check), AbortKind::kCheatGenerator);
  expect_cheat("evl-swap:" + std::to_string(check), AbortKind::kCheatGenerator);
  expect_cheat("witness:" + std::to_string(eval), AbortKind::kCheatGenerator);
  expect_cheat("key-hash-swap:0", AbortKind::kCheatCloud);
  expect_cheat("split-lie:1", AbortKind::kCheatCloud);
  expect_cheat("output-flip:0:0", AbortKind::kCheatCloud);
  expect_cheat("ot-columns", AbortKind::kCheatEvaluator);
}

TEST_CASE("a corrupted evaluation circuit is outvoted or flagged") {
  LocalChain probe(fast(16));
  const auto c = circuit::millionaires(3);
  const auto honest = probe.run(c, bits_from_uint(6, 3), bits_from_uint(2, 3));
  REQUIRE(honest.ok());
  const auto eval = split_of(honest).second;
  LocalChain chain(fast(16));
  const auto r = chain.run(c, bits_from_uint(6, 3), bits_from_uint(2, 3),
                           Tamper::parse("gate-row:" + std::to_string(eval)));
  INFO(why(r));
  REQUIRE(r.ok());
  CHECK(r.cloud.report.invalid_eval_circuits == 1);
  CHECK(r.evl.report.output == Bits{1});
}

TEST_CASE("partial gate tampering poisons the chain") {
  for (const char* spec : {"partial-row:all", "transform:all"}) {
    LocalChain chain(fast());
    REQUIRE(chain.run(circuit::counter_init(3), {}, bits_from_uint(2, 3)).ok());
    const auto r = chain.run(circuit::counter_increment(3), {}, {}, Tamper::parse(spec));
    INFO(spec << ": " << why(r));
    REQUIRE_FALSE(r.ok());
    CHECK(r.abort()->kind == AbortKind::kCheatGenerator);
    CHECK(r.abort()->phase == 4);
    CHECK(chain.gen_state()->poisoned);
    const auto again = chain.run(circuit::counter_increment(3), {}, {});
    REQUIRE_FALSE(again.ok());
    CHECK(again.abort()->kind == AbortKind::kState);
  }
}

TEST_CASE("configuration and state errors") {
  SUBCASE("t=1 without saved state") {
    ProtocolConfig cfg;
    cfg.circuit = circuit::counter_increment(3);
    cfg.base_ot = ot::BaseOtKind::kDealer;
    cfg.execution = 1;
    const auto r = run_local(cfg, {}, {}, std::nullopt, std::nullopt, {});
    REQUIRE_FALSE(r.ok());
    CHECK(r.abort()->kind == AbortKind::kState);
    CHECK(r.abort()->detail.find("no prior execution") != std::string::npos);
  }
  SUBCASE("parties disagree on the circuit") {
    ProtocolConfig a;
    a.circuit = circuit::millionaires(2);
    a.base_ot = ot::BaseOtKind::kDealer;
    ProtocolConfig b = a;
    b.circuit = circuit::millionaires(3);
    auto [ge_g, ge_e] = transport::make_pipe();
    auto [gc_g, gc_c] = transport::make_pipe();
    auto [ec_e, ec_c] = transport::make_pipe();
    Link g1(std::move(ge_g), "evaluator"), g2(std::move(gc_g), "cloud");
    Link e1(std::move(ge_e), "generator"), e2(std::move(ec_e), "cloud");
    Link c1(std::move(gc_c), "generator"), c2(std::move(ec_c), "evaluator");
    PartyResult gr, er;
    std::thread tg([&] { gr = run_generator(a, g1, g2, {Bits(2), std::nullopt, Block{1, 1}, {}}); });
    std::thread te([&] { er = run_evaluator(b, e1, e2, {Bits(3), std::nullopt, Block{2, 1}, {}}); });
    const auto cr = run_cloud(a, c1, c2, {{}, std::nullopt, Block{3, 1}, {}});
    tg.join();
    te.join();
    CHECK_FALSE(cr.report.ok);
    CHECK_FALSE(gr.report.ok);
    CHECK_FALSE(er.report.ok);
    CHECK(er.report.abort->kind == AbortKind::kConfig);
    CHECK(er.report.abort->phase == 1);
  }
  SUBCASE("semi-honest needs exactly one circuit") {
    ProtocolConfig cfg;
    cfg.circuit = circuit::millionaires(2);
    cfg.mode = Mode::kSemiHonest;
    const auto r = run_local(cfg, Bits(2), Bits(2), std::nullopt, std::nullopt, {});
    REQUIRE_FALSE(r.ok());
    CHECK(r.abort()->kind == AbortKind::kConfig);
  }
}

TEST_CASE("transcripts replay and match the byte counters") {
  const auto dir = std::filesystem::temp_directory_path() / "pgc-transcript-test";
  std::filesystem::remove_all(dir);
  auto opt = fast();
  opt.transcript_dir = dir;
  LocalChain chain(opt);
  REQUIRE(chain.run(circuit::counter_init(3), {}, bits_from_uint(1, 3)).ok());
  const auto r = chain.run(circuit::counter_increment(3), {}, {});
  REQUIRE(r.ok());
  const auto rep = transport::replay_transcript_file(dir / "t1" / "gen-to-cloud.bin");
  CHECK(rep.ok);
  CHECK(rep.bytes == r.gen.report.bytes_sent.at("cloud"));
  const auto rep2 = transport::replay_transcript_file(dir / "t1" / "evl-to-cloud.bin");
  CHECK(rep2.ok);
  CHECK(rep2.bytes == r.cloud.report.bytes_received.at("evaluator"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("majority vote and output verification") {
  CHECK(majority_vote({{1}, {1}, {0}}) == Bits{1});
  CHECK(majority_vote({{0}, {0}, {0}, {0}, {0}}) == Bits{0});
  CHECK_FALSE(majority_vote({{0}, {1}}).has_value());
  CHECK_FALSE(majority_vote({}).has_value());
  CHECK(verify_output({}, {}, {}, 0, 32).empty());
}

TEST_CASE("tamper spec parsing") {
  const auto t = Tamper::parse("gate-row:3:7");
  CHECK(t.is(Tamper::Kind::kGateRow));
  CHECK(t.circuit == 3);
  CHECK(t.index == 7);
  CHECK(Tamper::parse("partial-row:all").circuit == -1);
  CHECK(Tamper::parse("output-flip:0:3").to_string() == "output-flip:0:3");
  CHECK_THROWS_AS(Tamper::parse("melt:1"), Error);
}
