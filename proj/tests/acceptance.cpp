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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "pgc/bench.hpp"
#include "pgc/programs.hpp"
#include "pgc/protocol.hpp"

using namespace pgc;
using namespace pgc::protocol;

namespace {

// Pinned tolerances.
constexpr std::uint32_t kRandomTrials = 1000;       // per larger program
constexpr std::uint32_t kDetectionTrials = 1000;
constexpr double kDetectionExpected = 3.0 / 5.0;    // (S-N)/S at S=5
constexpr double kDetectionTolerance = 0.05;
constexpr std::uint32_t kMacTrials = 1000;
constexpr std::uint32_t kMacTagBits = 32;
constexpr double kBandwidthRatio = 0.50;

// Every honest run feeds the regeneration tally.
std::uint64_t g_compared = 0;
std::uint64_t g_mismatches = 0;
std::uint64_t g_runs = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

ChainOptions options(std::uint32_t s, std::uint64_t seed, ot::BaseOtKind base,
                     Mode mode = Mode::kMalicious) {
  ChainOptions o;
  o.circuits = s;
  o.mode = mode;
  o.base_ot = base;
  o.seed = Block{seed, 0xacce97};
  return o;
}

ExecutionResult run(LocalChain& chain, const circuit::CircuitIR& c, const Bits& g, const Bits& e,
                    const Tamper& t = {}) {
  auto r = chain.run(c, g, e, t);
  if (r.ok() && t.kind == Tamper::Kind::kNone) {
    g_compared += r.cloud.report.gates_compared;
    g_mismatches += r.cloud.report.gate_mismatches;
    ++g_runs;
  }
  return r;
}

std::string why(const ExecutionResult& r) {
  if (!r.abort()) return "ok";
  return "phase " + std::to_string(r.abort()->phase) + ": " + r.abort()->detail;
}

Bits take(const Bits& all, std::size_t from, std::size_t n) {
  return Bits(all.begin() + static_cast<std::ptrdiff_t>(from),
              all.begin() + static_cast<std::ptrdiff_t>(from + n));
}

// ---------------------------------------------------------------------------
// Independent reference functions.

std::uint64_t lcs_reference(const std::vector<int>& a, const std::vector<int>& b) {
  std::uint64_t best = 0;
  std::vector<std::vector<std::uint64_t>> L(a.size() + 1, std::vector<std::uint64_t>(b.size() + 1));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      L[i][j] = a[i - 1] == b[j - 1] ? L[i - 1][j - 1] + 1 : 0;
      best = std::max(best, L[i][j]);
    }
  }
  return best;
}

struct Program {
  std::string spec;
  // (gen bits, evl bits) -> (expected gen output, expected evl output)
  std::function<std::pair<Bits, Bits>(const Bits&, const Bits&)> reference;
};

std::vector<Program> t0_programs(bool small) {
  auto millionaires = [](std::uint32_t n) {
    return Program{"millionaires:" + std::to_string(n), [](const Bits& g, const Bits& e) {
                     const Bits gt{static_cast<std::uint8_t>(uint_from_bits(g) > uint_from_bits(e))};
                     return std::make_pair(gt, gt);
                   }};
  };
  auto keyed_db = [](std::uint32_t entries, std::uint32_t width) {
    return Program{"keyed_db:" + std::to_string(entries) + ":" + std::to_string(width),
                   [=](const Bits& g, const Bits& e) {
                     const auto key = uint_from_bits(g);
                     Bits out(width, 0);
                     if (key < entries) out = take(e, key * width, width);
                     return std::make_pair(out, Bits{});
                   }};
  };
  auto counter_add = [](std::uint32_t n, std::uint32_t k) {
    return Program{"counter_add:" + std::to_string(n) + ":" + std::to_string(k),
                   [=](const Bits&, const Bits& e) {
                     const std::uint64_t mask = n >= 64 ? ~0ull : (1ull << n) - 1;
                     return std::make_pair(Bits{}, bits_from_uint((uint_from_bits(e) + k) & mask, n));
                   }};
  };
  auto lcs = [](std::uint32_t len) {
    return Program{"lcs_full:" + std::to_string(len) + ":" + std::to_string(len),
                   [=](const Bits& g, const Bits& e) {
                     std::vector<int> a(g.begin(), g.end()), b(e.begin(), e.end());
                     return std::make_pair(
                         Bits{}, bits_from_uint(lcs_reference(a, b), circuit::lcs_value_bits(len)));
                   }};
  };
  auto map_start = Program{"map_start:4:2", [](const Bits&, const Bits&) {
                             return std::make_pair(Bits{}, Bits{});
                           }};
  if (small) {
    return {millionaires(1), millionaires(2), millionaires(3), millionaires(4),
            keyed_db(4, 1),  keyed_db(2, 3),  counter_add(4, 5), lcs(4),
            map_start};
  }
  return {millionaires(16), keyed_db(16, 8), counter_add(16, 1234), lcs(6)};
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  std::ostringstream d;
  std::uint64_t runs = 0;
  std::uint64_t seed = 1;
  auto check = [&](const Program& p, const circuit::CircuitIR& c, LocalChain& chain, const Bits& g,
                   const Bits& e) {
    const auto r = run(chain, c, g, e);
    ++runs;
    if (!r.ok()) {
      o.fail(p.spec + " aborted: " + why(r));
      return;
    }
    const auto [eg, ee] = p.reference(g, e);
    const auto sim = circuit::simulate_plaintext(c, g, e, {});
    if (r.gen.report.output != eg || r.evl.report.output != ee || sim.gen != eg || sim.evl != ee) {
      o.fail(p.spec + " differs from the reference at gen=" + bench::bits_to_hex(g) +
             " evl=" + bench::bits_to_hex(e));
    }
  };
  // Exhaustive, real group OT, both S values.
  for (std::uint32_t s : {5u, 16u}) {
    for (const auto& p : t0_programs(true)) {
      const auto c = circuit::build_program(circuit::ProgramSpec::parse(p.spec));
      const std::size_t bits = c.gen_input_count + c.evl_input_count;
      for (std::uint64_t v = 0; v < (1ull << bits); ++v) {
        LocalChain chain(options(s, seed++, ot::BaseOtKind::kGroup));
        const Bits all = bits_from_uint(v, bits);
        check(p, c, chain, take(all, 0, c.gen_input_count),
              take(all, c.gen_input_count, c.evl_input_count));
      }
    }
  }
  // Random inputs for larger programs: half at S=5, half at S=16.
  std::mt19937_64 rng(2024);
  for (const auto& p : t0_programs(false)) {
    const auto c = circuit::build_program(circuit::ProgramSpec::parse(p.spec));
    for (std::uint32_t t = 0; t < kRandomTrials; ++t) {
      LocalChain chain(options(t % 2 ? 16 : 5, seed++, ot::BaseOtKind::kDealer));
      Bits g(c.gen_input_count), e(c.evl_input_count);
      for (auto& b : g) b = rng() & 1;
      for (auto& b : e) b = rng() & 1;
      check(p, c, chain, g, e);
    }
  }
  d << runs << " executions; exhaustive (<=8 input bits, S=5 and S=16, group OT) and "
    << kRandomTrials << " random trials per larger program (S=5/16, dealer base OT); exact match";
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome chain_oracle() {
  // Scripted map flows against a shadow map.
  Outcome o;
  std::mt19937_64 rng(77);
  std::uint64_t runs = 0;
  for (std::uint32_t trial = 0; trial < 50; ++trial) {
    LocalChain chain(options(trial % 2 ? 16 : 5, 5000 + trial, ot::BaseOtKind::kDealer));
    const std::uint32_t cells = 8;
    const auto ib = circuit::index_bits(cells);
    std::vector<std::uint64_t> shadow(cells, 0);
    auto r = run(chain, circuit::map_start(cells), Bits{1}, {});
    ++runs;
    if (!r.ok()) {
      o.fail("map_start aborted: " + why(r));
      break;
    }
    for (int step = 0; step < 8 && o.pass; ++step) {
      const std::uint64_t cell = rng() % cells;
      if (rng() % 2) {
        const std::uint64_t user = 1 + rng() % 3;
        Bits in = bits_from_uint(user, 8);
        const Bits idx = bits_from_uint(cell, ib);
        in.insert(in.end(), idx.begin(), idx.end());
        r = run(chain, circuit::map_set(cells), {}, in);
        ++runs;
        const std::uint64_t before = shadow[cell];
        if (before == 0 || before == user) {
          for (auto& v : shadow) {
            if (v == user) v = 0;
          }
          shadow[cell] = user;
        }
        if (!r.ok() || uint_from_bits(r.evl.report.output) != before) {
          o.fail("map_set diverged from the shadow map: " + why(r));
        }
      } else {
        r = run(chain, circuit::map_get(cells), {}, bits_from_uint(cell, ib));
        ++runs;
        if (!r.ok() || uint_from_bits(r.evl.report.output) != shadow[cell]) {
          o.fail("map_get diverged from the shadow map: " + why(r));
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " chained map executions match the shadow map";
  return o;
}

Outcome reuse_equivalence() {
  Outcome o;
  std::uint64_t runs = 0;
  // Counter: init + 3 increments vs counter_add, all 6-bit starting values.
  for (std::uint64_t v = 0; v < 64 && o.pass; ++v) {
    LocalChain chain(options(5, 100 + v, ot::BaseOtKind::kGroup));
    auto r = run(chain, circuit::counter_init(6), {}, bits_from_uint(v, 6));
    ++runs;
    if (!r.ok()) o.fail("counter_init aborted: " + why(r));
    for (std::uint32_t k = 1; k <= 3 && o.pass; ++k) {
      r = run(chain, circuit::counter_increment(6), {}, {});
      LocalChain mono_chain(options(5, 900 + v * 4 + k, ot::BaseOtKind::kGroup));
      const auto mono = run(mono_chain, circuit::counter_add(6, k), {}, bits_from_uint(v, 6));
      runs += 2;
      if (!r.ok() || !mono.ok()) {
        o.fail("counter run aborted: " + why(r) + " / " + why(mono));
      } else if (r.evl.report.output != mono.evl.report.output ||
                 uint_from_bits(r.evl.report.output) != (v + k) % 64) {
        o.fail("counter chain differs from counter_add at v=" + std::to_string(v));
      }
    }
  }
  // LCS: three incremental steps vs lcs_full, all 3+3-bit string pairs.
  for (std::uint64_t v = 0; v < 64 && o.pass; ++v) {
    const Bits a = bits_from_uint(v & 7, 3), b = bits_from_uint(v >> 3, 3);
    LocalChain chain(options(5, 300 + v, ot::BaseOtKind::kGroup));
    for (std::uint32_t k = 1; k <= 3 && o.pass; ++k) {
      const auto r = run(chain, circuit::lcs_step(k, 3), Bits{a[k - 1]}, Bits{b[k - 1]});
      ++runs;
      const std::vector<int> pa(a.begin(), a.begin() + k), pb(b.begin(), b.begin() + k);
      const auto mono_c = circuit::lcs_full(k, 3);
      const auto mono_sim = circuit::simulate_plaintext(mono_c, take(a, 0, k), take(b, 0, k), {});
      if (!r.ok()) {
        o.fail("lcs_step aborted: " + why(r));
      } else if (r.evl.report.output != mono_sim.evl ||
                 uint_from_bits(r.evl.report.output) != lcs_reference(pa, pb)) {
        o.fail("lcs chain differs at step " + std::to_string(k) + " for v=" + std::to_string(v));
      }
      if (k == 3 && o.pass) {
        LocalChain mono_chain(options(5, 700 + v, ot::BaseOtKind::kGroup));
        const auto mono = run(mono_chain, mono_c, a, b);
        ++runs;
        if (!mono.ok() || mono.evl.report.output != r.evl.report.output) {
          o.fail("garbled lcs_full differs from the chain for v=" + std::to_string(v));
        }
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(runs) +
               " executions; counter (3 increments, 64 values) and LCS (3 steps, 64 string "
               "pairs) equal the monolithic circuits";
  }
  return o;
}

bool is_generator_cheat(const ExecutionResult& r) {
  return r.abort() && r.abort()->kind == AbortKind::kCheatGenerator;
}

Outcome detection_rate(bool partial) {
  Outcome o;
  std::mt19937_64 rng(partial ? 31 : 17);
  std::uint32_t detected = 0;
  for (std::uint32_t t = 0; t < kDetectionTrials && o.pass; ++t) {
    const std::uint32_t target = rng() % 5;
    LocalChain chain(options(5, (partial ? 20000 : 10000) + t, ot::BaseOtKind::kDealer));
    ExecutionResult r;
    if (partial) {
      if (!run(chain, circuit::counter_init(4), {}, bits_from_uint(rng() % 16, 4)).ok()) {
        o.fail("honest t=0 run aborted");
        break;
      }
      r = chain.run(circuit::counter_increment(4), {}, {},
                    Tamper::parse("partial-row:" + std::to_string(target) + ":" +
                                  std::to_string(rng() % 4)));
    } else {
      r = chain.run(circuit::millionaires(4), bits_from_uint(rng() % 16, 4),
                    bits_from_uint(rng() % 16, 4),
                    Tamper::parse("gate-row:" + std::to_string(target) + ":" +
                                  std::to_string(rng() % 1000)));
    }
    if (is_generator_cheat(r)) {
      ++detected;
    } else if (!r.ok() && !(r.abort() && r.abort()->kind == AbortKind::kUnreliableOutput)) {
      o.fail("unexpected abort: " + why(r));
    }
  }
  const double rate = double(detected) / kDetectionTrials;
  std::ostringstream d;
  d << detected << "/" << kDetectionTrials << " detected, rate " << rate << " (expected "
    << kDetectionExpected << " +/- " << kDetectionTolerance << ", S=5, N=2)";
  if (o.pass && std::fabs(rate - kDetectionExpected) > kDetectionTolerance) o.fail(d.str());
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome detection_all_partial() {
  Outcome o;
  std::uint32_t detected = 0;
  for (std::uint32_t t = 0; t < kDetectionTrials; ++t) {
    LocalChain chain(options(5, 30000 + t, ot::BaseOtKind::kDealer));
    if (!run(chain, circuit::counter_init(4), {}, bits_from_uint(t % 16, 4)).ok()) {
      o.fail("honest t=0 run aborted");
      break;
    }
    const auto r = chain.run(circuit::counter_increment(4), {}, {},
                             Tamper::parse("partial-row:all:" + std::to_string(t % 4)));
    if (is_generator_cheat(r) && chain.gen_state()->poisoned) ++detected;
  }
  std::ostringstream d;
  d << detected << "/" << kDetectionTrials << " runs detected with every circuit's partial gates corrupted";
  if (detected != kDetectionTrials) o.fail(d.str());
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome seed_regeneration() {
  Outcome o;
  std::ostringstream d;
  d << g_mismatches << " mismatches in " << g_compared
    << " regenerated units (input, partial and garbled gates, decode tables) over " << g_runs
    << " honest runs";
  if (g_mismatches != 0 || g_compared == 0) o.fail(d.str());
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome output_integrity() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uint32_t detected = 0;
  const auto c = circuit::counter_add(8, 3);
  const std::uint32_t width = 8 + kMacTagBits;
  for (std::uint32_t t = 0; t < kMacTrials; ++t) {
    auto opt = options(5, 40000 + t, ot::BaseOtKind::kDealer);
    opt.tag_bits = kMacTagBits;
    LocalChain chain(opt);
    const auto r = chain.run(c, {}, bits_from_uint(rng() % 256, 8),
                             Tamper::parse("output-flip:0:" + std::to_string(rng() % width)));
    if (!r.ok() && r.abort()->kind == AbortKind::kCheatCloud && r.abort()->phase == 6) ++detected;
  }
  std::ostringstream d;
  d << detected << "/" << kMacTrials << " single-bit output flips caught by the " << kMacTagBits
    << "-bit MAC";
  if (detected != kMacTrials) o.fail(d.str());
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome bandwidth_direction() {
  Outcome o;
  LocalChain chain(options(16, 50000, ot::BaseOtKind::kGroup));
  Bits db(64 * 8);
  std::mt19937_64 rng(9);
  for (auto& b : db) b = rng() & 1;
  const auto r0 = run(chain, circuit::keyed_db(64, 8), bits_from_uint(17, 6), db);
  const auto r1 = run(chain, circuit::keyed_db_saved(64, 8), bits_from_uint(42, 6), {});
  if (!r0.ok() || !r1.ok()) {
    o.fail("keyed_db chain aborted: " + why(r0) + " / " + why(r1));
    return o;
  }
  if (r1.gen.report.output != take(db, 42 * 8, 8)) o.fail("keyed_db_saved returned a wrong entry");
  const auto b0 = r0.evl.report.total_sent() + r0.evl.report.total_received();
  const auto b1 = r1.evl.report.total_sent() + r1.evl.report.total_received();
  const double ratio = double(b1) / double(b0);
  std::ostringstream d;
  d << "keyed_db(64) evaluator bytes t=0 " << b0 << ", t=1 " << b1 << ", ratio " << ratio
    << " (limit " << kBandwidthRatio << ", S=16)";
  if (ratio > kBandwidthRatio) o.fail(d.str());
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome key_lifecycle() {
  Outcome o;
  LocalChain chain(options(5, 60000, ot::BaseOtKind::kGroup));
  std::optional<Bytes> split;
  std::uint64_t t0_calls = 0, later_calls = 0;
  auto note_split = [&](const Bits& sel) {
    const Bytes b = pack_bits(sel);
    if (!split) split = b;
    if (*split != b) o.fail("split changed along the chain");
  };
  for (int t = 0; t < 5 && o.pass; ++t) {
    const auto r = t == 0 ? run(chain, circuit::counter_init(4), {}, bits_from_uint(3, 4))
                          : run(chain, circuit::counter_increment(4), {}, {});
    if (!r.ok()) {
      o.fail("execution " + std::to_string(t) + " aborted: " + why(r));
      break;
    }
    const auto calls = r.gen.report.ot.cut_and_choose_ot_calls + r.cloud.report.ot.cut_and_choose_ot_calls;
    (t == 0 ? t0_calls : later_calls) += calls;
    note_split(r.cloud.report.split->selection);
    note_split(r.evl.report.split->selection);
    note_split(chain.cloud_state()->keys.split.selection);
  }
  std::ostringstream d;
  d << "cut-and-choose OT calls: " << t0_calls << " at t=0, " << later_calls
    << " over t=1..4; split identical at cloud, evaluator and saved state";
  if (t0_calls == 0 || later_calls != 0) o.fail(d.str());
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome semi_honest_remap() {
  Outcome o;
  std::uint64_t runs = 0;
  auto semi = [&](std::uint64_t seed) { return LocalChain(options(1, seed, ot::BaseOtKind::kGroup, Mode::kSemiHonest)); };
  for (std::uint64_t v = 0; v < 16 && o.pass; ++v) {
    // millionaires(2): 4 input bits in one execution.
    {
      auto chain = semi(70000 + v);
      const Bits g = bits_from_uint(v & 3, 2), e = bits_from_uint(v >> 2, 2);
      const auto r = run(chain, circuit::millionaires(2), g, e);
      ++runs;
      if (!r.ok() || r.evl.report.output != Bits{static_cast<std::uint8_t>((v & 3) > (v >> 2))}) {
        o.fail("semi-honest millionaires wrong at v=" + std::to_string(v) + ": " + why(r));
      }
    }
    // 4-bit counter through two remapped increments and a read.
    {
      auto chain = semi(71000 + v);
      bool ok = run(chain, circuit::counter_init(4), {}, bits_from_uint(v, 4)).ok();
      ExecutionResult r;
      for (int k = 0; k < 2 && ok; ++k) {
        r = run(chain, circuit::counter_increment(4), {}, {});
        ok = r.ok() && uint_from_bits(r.evl.report.output) == (v + k + 1) % 16;
      }
      if (ok) {
        r = run(chain, circuit::counter_read(4), {}, {});
        ok = r.ok() && uint_from_bits(r.evl.report.output) == (v + 2) % 16;
      }
      runs += 4;
      if (!ok) o.fail("semi-honest counter chain wrong at v=" + std::to_string(v));
    }
    // 4-bit database read back through remapped wires, both keys.
    for (std::uint64_t key = 0; key < 2 && o.pass; ++key) {
      auto chain = semi(72000 + v * 2 + key);
      const Bits db = bits_from_uint(v, 4);
      bool ok = run(chain, circuit::keyed_db(2, 2), bits_from_uint(1 - key, 1), db).ok();
      const auto r = run(chain, circuit::keyed_db_saved(2, 2), bits_from_uint(key, 1), {});
      runs += 2;
      ok = ok && r.ok() && r.gen.report.output == take(db, key * 2, 2);
      if (!ok) o.fail("semi-honest keyed_db chain wrong at v=" + std::to_string(v));
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " semi-honest executions, exhaustive over 4-bit inputs";
  return o;
}

Outcome saveload_trend() {
  Outcome o;
  const auto scratch = std::filesystem::temp_directory_path() / "pgc-acceptance-saveload";
  const auto rows = bench::bench_saveload({64, 256, 1024}, {5, 10, 20, 40}, 80, scratch);
  std::filesystem::remove_all(scratch);
  const auto bad = bench::check_saveload_trend(rows);
  std::ostringstream d;
  double save = 0, load = 0;
  for (const auto& r : rows) {
    save += r.save_us_per_bit();
    load += r.load_us_per_bit();
  }
  d << rows.size() << " points (wires 64/256/1024, S 5..40); mean per bit: save "
    << save / rows.size() << " us, load " << load / rows.size() << " us; linear in S within 2x";
  if (!bad.empty()) o.fail(bad.front() + " (" + std::to_string(bad.size()) + " violations)");
  if (o.pass) o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  // Regeneration is reported last among the protocol checks so it covers
  // every honest run made before it.
  const std::vector<Criterion> criteria = {
      {"oracle-equivalence", oracle_equivalence},
      {"oracle-equivalence-chains", chain_oracle},
      {"reuse-equivalence", reuse_equivalence},
      {"cut-and-choose-detection-gates", [] { return detection_rate(false); }},
      {"cut-and-choose-detection-partial-gates", [] { return detection_rate(true); }},
      {"cut-and-choose-detection-all-partial", detection_all_partial},
      {"output-integrity", output_integrity},
      {"bandwidth-direction", bandwidth_direction},
      {"key-lifecycle", key_lifecycle},
      {"semi-honest-remap", semi_honest_remap},
      {"seed-regeneration", seed_regeneration},
      {"saveload-trend", saveload_trend},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << std::fixed
              << std::setprecision(1) << secs << " s]" << std::defaultfloat << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
