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
#include <random>
#include <thread>

#include "pgc/bench.hpp"
#include "pgc/cut_and_choose.hpp"
#include "pgc/garbling.hpp"
#include "pgc/ot.hpp"
#include "pgc/partial.hpp"
#include "pgc/programs.hpp"
#include "pgc/state.hpp"

using namespace pgc;

namespace {

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
  Bits b(n);
  for (auto& x : b) x = rng() & 1;
  return b;
}

std::pair<transport::Link, transport::Link> linked() {
  auto [a, b] = transport::make_pipe();
  return {transport::Link(std::move(a), "a"), transport::Link(std::move(b), "b")};
}

}  // namespace

TEST_CASE("circuit text round-trips through emit and parse") {
  for (const auto& name : {"millionaires:8", "keyed_db:4:3", "counter:6", "lcs_step:2:3",
                           "map_set:4", "map_get:4"}) {
    const auto c = circuit::build_program(circuit::ProgramSpec::parse(name));
    const auto back = circuit::parse_circuit(circuit::emit_circuit(c));
    CHECK(back == c);
    CHECK(circuit::circuit_digest_hex(back) == circuit::circuit_digest_hex(c));
  }
  CHECK(circuit::build_program(circuit::ProgramSpec::parse("map_set:4")).partial_input_count == 32);
}

TEST_CASE("parser lowers OR and reports positions") {
  const auto c = circuit::parse_circuit(
      "inputs gen 1 evl 1 partial 0\n"
      "gate 2 OR 0 1\n"
      "out evl 2\n");
  for (const auto& g : c.gates) CHECK(g.op != circuit::Op::kOr);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Bits ga{std::uint8_t(a)}, eb{std::uint8_t(b)};
      CHECK(circuit::simulate_plaintext(c, ga, eb, {}).evl == Bits{std::uint8_t(a | b)});
    }
  }
  try {
    circuit::parse_circuit("inputs gen 1 evl 1 partial 0\ngate 2 NAND 0 1\n");
    FAIL("accepted an unknown gate");
  } catch (const circuit::ParseError& e) {
    CHECK(e.line() == 2);
  }
  // Forward reference.
  CHECK_THROWS_AS(circuit::parse_circuit("inputs gen 1 evl 1 partial 0\ngate 2 AND 0 3\n"),
                  FormatError);
}

TEST_CASE("garbled evaluation matches plaintext") {
  std::mt19937_64 rng(1);
  const auto c = circuit::build_program(circuit::ProgramSpec::parse("millionaires:8"));
  for (unsigned k : {8u, 80u, 120u}) {
    const auto ctx = garbling::derive_context(Block{rng(), rng()}, 3, c, k);
    const auto gates = garbling::garble_circuit(ctx, c);
    const auto table = garbling::make_decode_table(ctx, c.evl_outputs);
    for (int trial = 0; trial < 20; ++trial) {
      const Bits g = random_bits(rng, 8), e = random_bits(rng, 8);
      std::vector<Block> in;
      for (std::uint32_t i = 0; i < 8; ++i) in.push_back(ctx.label(c.gen_input(i), g[i]));
      for (std::uint32_t i = 0; i < 8; ++i) in.push_back(ctx.label(c.evl_input(i), e[i]));
      const auto labels = garbling::evaluate_circuit(c, gates, in, 3, k);
      const auto want = circuit::simulate_plaintext(c, g, e, {}).evl;
      for (std::size_t o = 0; o < c.evl_outputs.size(); ++o) {
        const auto w = c.evl_outputs[o];
        CHECK(labels[w] == ctx.label(w, want[o]));
        CHECK(garbling::decode_output(table[o], labels[w], 3, w) == std::optional<bool>(want[o]));
      }
    }
  }
}

TEST_CASE("corrupted garbled row is caught at evaluation") {
  const auto c = circuit::build_program(circuit::ProgramSpec::parse("millionaires:4"));
  const auto ctx = garbling::derive_context(Block{5, 6}, 0, c, 80);
  auto gates = garbling::garble_circuit(ctx, c);
  std::vector<Block> in;
  for (std::uint32_t w = 0; w < c.input_count(); ++w) in.push_back(ctx.label(w, false));
  // Flip a bit in every row of the first AND gate so whichever row is used fails.
  for (auto& r : gates.front().rows) r ^= Block{1ULL << 7, 0};
  CHECK_THROWS_AS(garbling::evaluate_circuit(c, gates, in, 0, 80), garbling::CorruptGateError);
  CHECK_THROWS(garbling::check_label_bits(4));
}

TEST_CASE("ot extension delivers the chosen messages") {
  std::mt19937_64 rng(2);
  for (auto kind : {ot::BaseOtKind::kDealer, ot::BaseOtKind::kGroup}) {
    auto [s, r] = linked();
    const std::size_t n = 300;
    std::vector<std::pair<Block, Block>> pairs(n);
    for (auto& p : pairs) p = {Block{rng(), rng()}, Block{rng(), rng()}};
    const Bits choice = random_bits(rng, n);
    ot::ExtensionOptions opt;
    opt.base_kind = kind;
    ot::OtStats ss, rs;
    std::thread sender([&, &s = s] {
      crypto::Prg prg(Block{1, 1});
      ot::extend_send(s, 2, opt, pairs, prg, ss);
    });
    crypto::Prg prg(Block{2, 2});
    const auto got = ot::extend_receive(r, 2, opt, choice, prg, rs);
    sender.join();
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(got[i] == (choice[i] ? pairs[i].second : pairs[i].first));
    }
    // Only K public-key transfers regardless of n.
    CHECK(rs.base_transfers == opt.base_count);
  }
}

TEST_CASE("ot extension rejects inconsistent columns") {
  auto [s, r] = linked();
  std::vector<std::pair<Block, Block>> pairs(64, {Block{1, 0}, Block{2, 0}});
  const Bits choice(64, 1);
  ot::ExtensionOptions opt;
  opt.base_kind = ot::BaseOtKind::kDealer;
  ot::ExtensionOptions bad = opt;
  bad.corrupt_columns = true;
  ot::OtStats ss, rs;
  bool rejected = false;
  std::thread sender([&, &s = s] {
    crypto::Prg prg(Block{1, 1});
    try {
      ot::extend_send(s, 2, opt, pairs, prg, ss);
    } catch (const ot::OtConsistencyError&) {
      rejected = true;
      s.close();
    }
  });
  crypto::Prg prg(Block{2, 2});
  try {
    ot::extend_receive(r, 2, bad, choice, prg, rs);
  } catch (const std::exception&) {
  }
  sender.join();
  CHECK(rejected);
}

TEST_CASE("input encoding hides bits in xor shares") {
  crypto::Prg prg(Block{9, 9});
  const Bits bits{1, 0, 1, 1, 0};
  const auto enc = ot::encode_input(bits, 4, prg);
  CHECK(enc.shares.size() == 20);
  CHECK(ot::decode_input(enc.shares, 4) == bits);
}

TEST_CASE("cut-and-choose split and key hashes") {
  crypto::Prg prg(Block{3, 4});
  for (std::uint32_t s : {5u, 16u, 40u}) {
    const auto split = cnc::select_split(s, prg);
    CHECK(split.eval_count() == cnc::eval_count_for(s));
    CHECK(split.eval_count() == 2 * s / 5);
    const auto keys = cnc::make_key_pairs(s, 80, prg);
    const auto pairs = cnc::key_hash_pairs(keys, 80);
    std::vector<cnc::CloudKeyClaim> claims;
    for (std::uint32_t i = 0; i < s; ++i) {
      const bool check = split.is_check(i);
      claims.push_back({cnc::hash_key(keys[i].for_bit(check), i, 80), check});
    }
    CHECK(cnc::verify_split_hashes(pairs, claims) == split);
    claims[1].check = !claims[1].check;  // lie about one bit
    CHECK_THROWS_AS(cnc::verify_split_hashes(pairs, claims), cnc::SplitMismatchError);
  }
  CHECK_THROWS(cnc::select_split(4, prg));
  const Block k{7, 0};
  const Bytes data{1, 2, 3, 4, 5};
  const auto sealed = cnc::seal_package(k, 2, 1, cnc::kEvalPackage, data);
  CHECK(sealed != data);
  CHECK(cnc::seal_package(k, 2, 1, cnc::kEvalPackage, sealed) == data);
}

TEST_CASE("key file and state round-trip") {
  crypto::Prg prg(Block{5, 5});
  cnc::KeyRing ring;
  ring.split = cnc::select_split(5, prg);
  ring.pairs = cnc::make_key_pairs(5, 80, prg);
  CHECK(cnc::decode_key_file(cnc::encode_key_file(ring, 80), 80) == ring);

  state::SavedState st;
  st.next_execution = 3;
  st.circuits = 5;
  st.keys = ring;
  st.wires.assign(5, std::vector<partial::SavedWireRecord>(0));
  const auto bytes = state::encode_state(st);
  CHECK(state::decode_state(bytes) == st);

  auto broken = bytes;
  broken[0] = 'X';
  CHECK_THROWS_AS(state::decode_state(broken), state::StateError);
  CHECK_THROWS(state::decode_state(std::span(bytes).first(bytes.size() - 1)));

  const auto dir = std::filesystem::temp_directory_path() / "pgc_state_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "g.state";
  state::persist_state(path, st);
  CHECK(state::load_state(path) == st);
  state::poison_state_file(path);
  CHECK(state::load_state(path).poisoned);
  std::filesystem::remove_all(dir);
}

TEST_CASE("frames encode, decode and reject garbage") {
  transport::Frame f;
  f.phase = 3;
  f.type = 0x50;
  f.exec_id = 9;
  f.payload = {1, 2, 3};
  const auto bytes = transport::encode_frame(f);
  CHECK(bytes.size() == f.wire_size());
  const auto back = transport::decode_frame(bytes);
  CHECK(back == f);
  CHECK_THROWS_AS(transport::decode_frame(std::span(bytes).first(5)), FormatError);

  CHECK(transport::parse_endpoint("127.0.0.1:9000") ==
        std::pair<std::string, std::uint16_t>{"127.0.0.1", 9000});
  CHECK_THROWS(transport::parse_endpoint("nohost"));
}

TEST_CASE("bench input parsing and csv rows") {
  CHECK(bench::parse_input("5", 4) == Bits{1, 0, 1, 0});
  CHECK(bench::parse_input("0x3", 3) == Bits{1, 1, 0});
  CHECK_THROWS(bench::parse_input("16", 4));
  CHECK(bench::bits_to_hex(Bits{1, 0, 1, 0}) == "0x05");
}
