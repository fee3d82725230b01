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

#include "pgc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "pgc/garbling.hpp"
#include "pgc/partial.hpp"
#include "pgc/programs.hpp"

namespace pgc::bench {

using protocol::ExecutionResult;
using protocol::PartyResult;
using transport::ByteStream;
using transport::Link;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string fmt_ms(double v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << v;
  return o.str();
}

Block trial_seed(const RunConfig& cfg, Role r, std::uint32_t trial) {
  if (!cfg.seed) return crypto::os_random_block();
  crypto::Prg prg(*cfg.seed, crypto::make_tweak(crypto::Domain::kContext,
                                                static_cast<std::uint32_t>(r), trial));
  return prg.next_block();
}

Bits input_for(const RunConfig& cfg, const std::optional<std::string>& given, std::size_t width,
               Role r, std::uint32_t trial) {
  if (given) return parse_input(*given, width);
  // Unseeded runs draw inputs from the OS; seeded runs are reproducible.
  crypto::Prg prg(trial_seed(cfg, r, trial), Block{0x696e707574, trial});
  Bits b(width);
  for (auto& x : b) x = prg.next_bit() ? 1 : 0;
  return b;
}

// Connection set-up: the connecting side sends its role, the accepting side
// answers with its role and the execution id it is about to run.
void write_hello(ByteStream& s, Role r, std::uint64_t t) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(r));
  w.u64(t);
  const Bytes b = std::move(w).take();
  s.write(b);
}

std::pair<Role, std::uint64_t> read_hello(ByteStream& s) {
  Bytes b(9);
  s.read_exact(b);
  ByteReader r(b);
  const auto role = r.u8();
  if (role < 1 || role > 3) throw Error("peer sent an unknown role");
  const auto t = r.u64();
  return {static_cast<Role>(role), t};
}

struct Peers {
  std::unique_ptr<Link> first;   // gen: evaluator, evl: generator, cloud: generator
  std::unique_ptr<Link> second;  // gen: cloud,     evl: cloud,     cloud: evaluator
  std::uint64_t execution = 0;
};

Peers connect_peers(const RunConfig& cfg, Role me, std::uint64_t t,
                    transport::TcpListener* listener) {
  Peers p;
  p.execution = t;
  auto dial = [&](const std::string& ep) {
    const auto [host, port] = transport::parse_endpoint(ep);
    auto s = transport::tcp_connect(host, port, cfg.timeout_ms);
    write_hello(*s, me, t);
    const auto [role, their_t] = read_hello(*s);
    return std::make_tuple(std::move(s), role, their_t);
  };
  auto accept_one = [&] {
    auto s = listener->accept();
    const auto [role, _] = read_hello(*s);
    write_hello(*s, me, t);
    return std::make_pair(std::move(s), role);
  };
  switch (me) {
    case Role::kGenerator: {
      if (cfg.connect.size() != 1 || !listener) {
        throw Error("generator needs --listen and one --connect (the cloud)");
      }
      auto [cs, crole, ct] = dial(cfg.connect[0]);
      if (crole != Role::kCloud) throw Error("--connect endpoint is not the cloud");
      auto [es, erole] = accept_one();
      if (erole != Role::kEvaluator) throw Error("unexpected party connected to the generator");
      p.first = std::make_unique<Link>(std::move(es), "evaluator");
      p.second = std::make_unique<Link>(std::move(cs), "cloud");
      break;
    }
    case Role::kEvaluator: {
      if (cfg.connect.size() != 2) {
        throw Error("evaluator needs two --connect endpoints (generator and cloud)");
      }
      std::unique_ptr<ByteStream> gs, cs;
      for (const auto& ep : cfg.connect) {
        auto [s, role, their_t] = dial(ep);
        if (role == Role::kGenerator) {
          gs = std::move(s);
          p.execution = their_t;  // the evaluator is stateless and follows the chain
        } else if (role == Role::kCloud) {
          cs = std::move(s);
        }
      }
      if (!gs || !cs) throw Error("evaluator must reach one generator and one cloud");
      p.first = std::make_unique<Link>(std::move(gs), "generator");
      p.second = std::make_unique<Link>(std::move(cs), "cloud");
      break;
    }
    case Role::kCloud: {
      if (!listener) throw Error("cloud needs --listen");
      std::unique_ptr<ByteStream> gs, es;
      for (int k = 0; k < 2; ++k) {
        auto [s, role] = accept_one();
        if (role == Role::kGenerator && !gs) {
          gs = std::move(s);
        } else if (role == Role::kEvaluator && !es) {
          es = std::move(s);
        } else {
          throw Error("unexpected party connected to the cloud");
        }
      }
      p.first = std::make_unique<Link>(std::move(gs), "generator");
      p.second = std::make_unique<Link>(std::move(es), "evaluator");
      break;
    }
  }
  if (cfg.transcript_dir) {
    std::filesystem::create_directories(*cfg.transcript_dir);
    const std::string me_name(role_name(me));
    const auto name = [&](const Link& l) {
      return cfg.transcript_dir->string() + "/" + me_name + "-to-" + l.peer() + "-t" +
             std::to_string(p.execution) + ".bin";
    };
    p.first->record_transcript(name(*p.first));
    p.second->record_transcript(name(*p.second));
  }
  return p;
}

std::optional<std::filesystem::path> state_location(const RunConfig& cfg) {
  if (cfg.state_path) return cfg.state_path;
  if (const char* dir = std::getenv("PGC_STATE_DIR"); dir && *dir) {
    return std::filesystem::path(dir);
  }
  return std::nullopt;
}

std::filesystem::path state_file(const std::filesystem::path& loc, Role r, bool local) {
  // A directory (or any location for local runs) holds one file per role.
  if (local || std::filesystem::is_directory(loc)) {
    return loc / (std::string(role_name(r)) + ".state");
  }
  return loc;
}

std::optional<state::SavedState> load_if_present(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) return std::nullopt;
  return state::load_state(p);
}

void fill_party(TrialRow& row, const PartyResult& p) {
  const auto bytes = std::make_pair(p.report.total_sent(), p.report.total_received());
  switch (p.report.role) {
    case Role::kGenerator:
      row.gen_bytes = bytes;
      row.gen_output = p.report.output;
      break;
    case Role::kEvaluator:
      row.evl_bytes = bytes;
      row.evl_output = p.report.output;
      break;
    case Role::kCloud:
      row.cloud_bytes = bytes;
      row.gates_compared = p.report.gates_compared;
      row.gate_mismatches = p.report.gate_mismatches;
      break;
  }
  row.and_gates = std::max(row.and_gates, p.report.and_gates);
  row.ot += p.report.ot;
  row.millis = std::max(row.millis, p.report.millis);
}

protocol::ProtocolConfig protocol_config(const RunConfig& cfg, const circuit::CircuitIR& c,
                                         std::uint64_t t) {
  protocol::ProtocolConfig pc;
  pc.circuit = c;
  pc.circuits = cfg.circuits;
  pc.label_bits = cfg.label_bits;
  pc.encoding_width = cfg.encoding_width;
  pc.tag_bits = cfg.tag_bits;
  pc.mode = cfg.mode;
  pc.base_ot = cfg.base_ot;
  pc.execution = t;
  return pc;
}

}  // namespace

const std::string& csv_header() {
  static const std::string h =
      "trial,role,program,circuits,label_bits,encoding,tag_bits,mode,execution,status,"
      "abort_kind,abort_phase,abort_detail,millis,gen_sent,gen_received,evl_sent,evl_received,"
      "cloud_sent,cloud_received,and_gates,base_ots,extended_ots,cnc_ots,gates_compared,"
      "gate_mismatches,gen_output,evl_output";
  return h;
}

Bits parse_input(const std::string& text, std::size_t width) {
  Bits out(width, 0);
  if (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0) {
    std::string hex = text.substr(2);
    if (hex.size() % 2) hex.insert(hex.begin(), '0');
    Bytes be = from_hex(hex);
    std::reverse(be.begin(), be.end());
    const Bits bits = unpack_bits(be, be.size() * 8);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!bits[i]) continue;
      if (i >= width) throw Error("input '" + text + "' does not fit " + std::to_string(width) + " bits");
      out[i] = 1;
    }
    return out;
  }
  std::uint64_t v = 0;
  std::size_t used = 0;
  try {
    v = std::stoull(text, &used, 10);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw Error("bad input value '" + text + "'");
  if (width < 64 && (v >> width) != 0) {
    throw Error("input '" + text + "' does not fit " + std::to_string(width) + " bits");
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(width, 64); ++i) out[i] = (v >> i) & 1;
  return out;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  if (bits.empty()) return "";
  Bytes le = pack_bits(bits);
  std::reverse(le.begin(), le.end());
  return "0x" + to_hex(le);
}

std::string csv_row(const RunConfig& cfg, const TrialRow& row) {
  std::ostringstream o;
  auto pair = [&](const std::optional<std::pair<std::uint64_t, std::uint64_t>>& p) {
    if (p) {
      o << p->first << ',' << p->second;
    } else {
      o << ',';
    }
  };
  o << row.trial << ',' << row.role << ',' << csv_escape(cfg.program) << ',' << cfg.circuits << ','
    << cfg.label_bits << ',' << cfg.encoding_width << ',' << cfg.tag_bits << ','
    << (cfg.mode == state::Mode::kMalicious ? "malicious" : "semi") << ',' << row.execution << ','
    << (row.ok ? "ok" : "abort") << ',';
  if (row.abort) {
    o << transport::abort_kind_name(row.abort->kind) << ',' << int(row.abort->phase) << ','
      << csv_escape(row.abort->detail);
  } else {
    o << ",,";
  }
  o << ',' << fmt_ms(row.millis) << ',';
  pair(row.gen_bytes);
  o << ',';
  pair(row.evl_bytes);
  o << ',';
  pair(row.cloud_bytes);
  o << ',' << row.and_gates << ',' << row.ot.base_transfers << ',' << row.ot.extended_transfers
    << ',' << row.ot.cut_and_choose_ot_calls << ',' << row.gates_compared << ','
    << row.gate_mismatches << ',' << bits_to_hex(row.gen_output) << ','
    << bits_to_hex(row.evl_output);
  return o.str();
}

int cmd_run(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  if (cfg.trials < 1) throw Error("--trials must be at least 1");
  const auto circuit = circuit::build_program(circuit::ProgramSpec::parse(cfg.program));
  const bool local = !cfg.role.has_value();
  const auto loc = state_location(cfg);
  std::optional<std::ofstream> file;
  if (cfg.csv_path) {
    file.emplace(*cfg.csv_path);
    if (!*file) throw Error("cannot write " + cfg.csv_path->string());
    *file << csv_header() << '\n';
  }
  csv << csv_header() << '\n';
  auto emit = [&](const TrialRow& row) {
    const std::string line = csv_row(cfg, row);
    csv << line << '\n';
    if (file) *file << line << '\n';
  };

  // Generator and cloud carry state; the evaluator never does.
  std::optional<state::SavedState> gen_state, cloud_state;
  std::optional<std::filesystem::path> gen_file, cloud_file;
  if (loc) {
    if (local || cfg.role == Role::kGenerator) gen_file = state_file(*loc, Role::kGenerator, local);
    if (local || cfg.role == Role::kCloud) cloud_file = state_file(*loc, Role::kCloud, local);
    if (local) std::filesystem::create_directories(*loc);
    if (!cfg.fresh) {
      if (gen_file) gen_state = load_if_present(*gen_file);
      if (cloud_file) cloud_state = load_if_present(*cloud_file);
    }
  }
  auto current_t = [&]() -> std::uint64_t {
    if (!loc) return 0;  // stateless: every trial is a fresh execution
    const auto& s = gen_state ? gen_state : cloud_state;
    return s ? s->next_execution : 0;
  };

  std::unique_ptr<transport::TcpListener> listener;
  if (!local && cfg.listen) {
    const auto [host, port] = transport::parse_endpoint(*cfg.listen);
    listener = std::make_unique<transport::TcpListener>(host, port);
  }

  int exit_code = kExitOk;
  for (std::uint32_t trial = 0; trial < cfg.trials; ++trial) {
    TrialRow row;
    row.trial = trial;
    row.execution = current_t();
    std::optional<protocol::AbortInfo> abort;
    if (local) {
      row.role = "all";
      protocol::LocalRunOptions lo;
      lo.gen_seed = trial_seed(cfg, Role::kGenerator, trial);
      lo.evl_seed = trial_seed(cfg, Role::kEvaluator, trial);
      lo.cloud_seed = trial_seed(cfg, Role::kCloud, trial);
      lo.tamper = cfg.tamper;
      if (cfg.transcript_dir) lo.transcript_dir = *cfg.transcript_dir / ("t" + std::to_string(row.execution));
      const auto r = protocol::run_local(
          protocol_config(cfg, circuit, row.execution),
          input_for(cfg, cfg.gen_input, circuit.gen_input_count, Role::kGenerator, trial),
          input_for(cfg, cfg.evl_input, circuit.evl_input_count, Role::kEvaluator, trial),
          loc ? gen_state : std::nullopt, loc ? cloud_state : std::nullopt, lo);
      fill_party(row, r.gen);
      fill_party(row, r.evl);
      fill_party(row, r.cloud);
      row.ok = r.ok();
      row.abort = r.abort();
      if (row.ok && loc) {
        gen_state = r.gen.next_state;
        cloud_state = r.cloud.next_state;
      }
    } else {
      const Role me = *cfg.role;
      row.role = std::string(role_name(me));
      Bits input;
      if (me == Role::kGenerator) {
        input = input_for(cfg, cfg.gen_input, circuit.gen_input_count, me, trial);
      } else if (me == Role::kEvaluator) {
        input = input_for(cfg, cfg.evl_input, circuit.evl_input_count, me, trial);
      }
      Peers peers = connect_peers(cfg, me, row.execution, listener.get());
      row.execution = peers.execution;
      protocol::PartyParams pp;
      pp.seed = trial_seed(cfg, me, trial);
      pp.tamper = cfg.tamper;
      const auto pc = protocol_config(cfg, circuit, row.execution);
      PartyResult res;
      if (me == Role::kGenerator) {
        pp.input = input;
        pp.prior = gen_state;
        res = protocol::run_generator(pc, *peers.first, *peers.second, pp);
      } else if (me == Role::kEvaluator) {
        pp.input = input;
        res = protocol::run_evaluator(pc, *peers.first, *peers.second, pp);
      } else {
        pp.prior = cloud_state;
        res = protocol::run_cloud(pc, *peers.first, *peers.second, pp);
      }
      fill_party(row, res);
      row.ok = res.report.ok;
      row.abort = res.report.abort;
      if (row.ok && loc) (me == Role::kGenerator ? gen_state : cloud_state) = res.next_state;
    }

    if (row.ok) {
      if (gen_file && gen_state) state::persist_state(*gen_file, *gen_state);
      if (cloud_file && cloud_state) state::persist_state(*cloud_file, *cloud_state);
    } else {
      const bool cheating = row.abort && transport::is_cheating(row.abort->kind);
      if (cheating && row.execution >= 1) {
        // The chain must be abandoned.
        if (gen_file) state::poison_state_file(*gen_file);
        if (cloud_file) state::poison_state_file(*cloud_file);
      }
      log << "trial " << trial << ": abort in phase " << int(row.abort->phase) << " ("
          << transport::abort_kind_name(row.abort->kind) << "): " << row.abort->detail << '\n';
      exit_code = cheating ? kExitCheating : kExitAbort;
    }
    emit(row);
    if (!row.ok) break;
  }
  return exit_code;
}

// ---------------------------------------------------------------------------

double SaveLoadRow::save_us_per_bit() const {
  return wires == 0 ? 0.0 : save_ms * 1000.0 / (double(wires) * circuits);
}

double SaveLoadRow::load_us_per_bit() const {
  return wires == 0 ? 0.0 : load_ms * 1000.0 / (double(wires) * circuits);
}

namespace {

// Average milliseconds per call, repeating until a batch lasts min_ms.
template <class F>
double time_per_call(F&& f, double min_ms) {
  f();  // warm caches and the file system
  double best = 1e300;
  for (int round = 0; round < 3; ++round) {
    std::size_t reps = 0;
    const auto start = Clock::now();
    do {
      f();
      ++reps;
    } while (ms_since(start) < min_ms);
    best = std::min(best, ms_since(start) / double(reps));
  }
  return best;
}

}  // namespace

std::vector<SaveLoadRow> bench_saveload(const std::vector<std::uint32_t>& wire_counts,
                                        const std::vector<std::uint32_t>& circuit_counts,
                                        unsigned label_bits, const std::filesystem::path& scratch,
                                        double min_batch_ms) {
  std::filesystem::create_directories(scratch);
  std::vector<SaveLoadRow> rows;
  for (std::uint32_t n : wire_counts) {
    for (std::uint32_t s : circuit_counts) {
      SaveLoadRow row{n, s, 0, 0};
      if (n == 0) {
        rows.push_back(row);
        continue;
      }
      // A circuit that reads and re-saves n wires: the chain's steady state.
      const auto c = circuit::counter_read(n);
      std::vector<garbling::GarblingContext> prev, next;
      for (std::uint32_t i = 0; i < s; ++i) {
        prev.push_back(garbling::derive_context(Block{i + 1, n}, i, c, label_bits));
        next.push_back(garbling::derive_context(Block{i + 101, n}, i, c, label_bits));
      }
      const auto path = scratch / ("saveload-" + std::to_string(n) + "-" + std::to_string(s));
      auto save = [&] {
        state::SavedState st;
        st.role = Role::kGenerator;
        st.next_execution = 1;
        st.circuits = s;
        st.label_bits = label_bits;
        st.keys.role = Role::kGenerator;
        st.keys.split.selection.assign(s, 0);
        for (std::uint32_t i = 0; i < s; ++i) {
          st.keys.pairs.push_back({Block{i, 1}, Block{i, 2}});
          st.wires.push_back(partial::save_partial_outputs(&prev[i], c, true, nullptr));
        }
        state::persist_state(path, st);
      };
      save();
      auto load = [&] {
        const auto st = state::load_state(path);
        for (std::uint32_t i = 0; i < s; ++i) {
          std::vector<std::pair<Block, Block>> pouts;
          for (const auto& rec : st.wires[i]) pouts.emplace_back(rec.slot0, rec.slot1);
          const Block r = partial::derive_transform(next[i].seed, i, label_bits);
          const auto batch = partial::generate_partial_input_gates(pouts, next[i], c, r);
          if (batch.gates.size() != n) throw Error("save/load benchmark: wrong gate count");
        }
      };
      row.save_ms = time_per_call(save, min_batch_ms);
      row.load_ms = time_per_call(load, min_batch_ms);
      std::filesystem::remove(path);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<std::string> check_saveload_trend(const std::vector<SaveLoadRow>& rows) {
  std::vector<std::string> bad;
  std::map<std::uint32_t, std::vector<const SaveLoadRow*>> by_wires;
  for (const auto& r : rows) {
    if (r.wires == 0) continue;
    if (!(r.load_ms > r.save_ms)) {
      bad.push_back("wires=" + std::to_string(r.wires) + " S=" + std::to_string(r.circuits) +
                    ": load " + fmt_ms(r.load_ms) + " ms <= save " + fmt_ms(r.save_ms) + " ms");
    }
    by_wires[r.wires].push_back(&r);
  }
  for (const auto& [wires, pts] : by_wires) {
    if (pts.size() < 2) continue;
    for (const bool is_load : {false, true}) {
      // Least squares t = a + b*S.
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = double(pts.size());
      for (const auto* p : pts) {
        const double x = p->circuits, y = is_load ? p->load_ms : p->save_ms;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      const double a = (sy - b * sx) / n;
      for (const auto* p : pts) {
        const double y = is_load ? p->load_ms : p->save_ms;
        const double fit = a + b * p->circuits;
        if (fit <= 0 || y > 2 * fit || y < fit / 2) {
          bad.push_back(std::string(is_load ? "load" : "save") + " wires=" +
                        std::to_string(wires) + " S=" + std::to_string(p->circuits) + ": " +
                        fmt_ms(y) + " ms vs linear fit " + fmt_ms(fit) + " ms");
        }
      }
    }
  }
  return bad;
}

const std::string& saveload_csv_header() {
  static const std::string h = "wires,circuits,save_ms,load_ms,save_us_per_bit,load_us_per_bit";
  return h;
}

std::string saveload_csv_row(const SaveLoadRow& r) {
  std::ostringstream o;
  o << r.wires << ',' << r.circuits << ',' << fmt_ms(r.save_ms) << ',' << fmt_ms(r.load_ms) << ','
    << fmt_ms(r.save_us_per_bit()) << ',' << fmt_ms(r.load_us_per_bit());
  return o.str();
}

int cmd_bench_saveload(const std::vector<std::uint32_t>& wire_counts,
                       const std::vector<std::uint32_t>& circuit_counts, unsigned label_bits,
                       const std::optional<std::filesystem::path>& csv_path, std::ostream& out,
                       std::ostream& log) {
  std::uint8_t tag[8];
  crypto::os_random_block().to_bytes(tag);
  const auto scratch = std::filesystem::temp_directory_path() / ("pgc-saveload-" + to_hex(tag));
  const auto rows = bench_saveload(wire_counts, circuit_counts, label_bits, scratch);
  std::filesystem::remove_all(scratch);
  std::optional<std::ofstream> file;
  if (csv_path) {
    file.emplace(*csv_path);
    if (!*file) throw Error("cannot write " + csv_path->string());
    *file << saveload_csv_header() << '\n';
  }
  out << saveload_csv_header() << '\n';
  for (const auto& r : rows) {
    out << saveload_csv_row(r) << '\n';
    if (file) *file << saveload_csv_row(r) << '\n';
  }
  const auto bad = check_saveload_trend(rows);
  for (const auto& b : bad) log << "trend: " << b << '\n';
  return bad.empty() ? kExitOk : kExitAbort;
}

int cmd_replay(const std::filesystem::path& path, std::ostream& out) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  if (files.empty()) throw Error("no transcripts under " + path.string());
  bool all_ok = true;
  for (const auto& f : files) {
    const auto rep = transport::replay_transcript_file(f);
    out << f.string() << ": " << rep.frames << " frames, " << rep.bytes << " bytes, ";
    if (rep.ok) {
      std::string phases;
      for (auto p : rep.phases) {
        if (phases.empty() || phases.back() != char('0' + p)) phases += char('0' + p);
      }
      out << "ok (phases " << phases << ")\n";
    } else {
      all_ok = false;
      out << "FAILED at frame " << rep.failing_frame << ": " << rep.failure << '\n';
    }
  }
  return all_ok ? kExitOk : kExitAbort;
}

}  // namespace pgc::bench
