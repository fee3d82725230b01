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

#include "pgc/friendfinder.hpp"

#include "json.hpp"
#include "pgc/programs.hpp"

namespace pgc::friendfinder {

std::string Event::to_json() const {
  nlohmann::json j;
  j["type"] = type;
  j["op"] = op;
  j["request"] = request;
  if (user) j["user"] = *user;
  if (abort) {
    j["phase"] = abort->phase;
    j["kind"] = std::string(transport::abort_kind_name(abort->kind));
    j["detail"] = abort->detail;
  }
  if (result) j["result"] = *result;
  if (value) j["value"] = *value;
  return j.dump();
}

namespace {

protocol::ChainOptions chain_options(const ServiceOptions& opt) {
  protocol::ChainOptions o;
  o.circuits = opt.circuits;
  o.label_bits = opt.label_bits;
  o.base_ot = opt.base_ot;
  o.seed = opt.seed;
  return o;
}

}  // namespace

MapSession::MapSession(std::string id, std::uint32_t cells, const ServiceOptions& opt)
    : id_(std::move(id)),
      cells_(cells),
      index_bits_(circuit::index_bits(cells)),
      set_circuit_(circuit::map_set(cells, kCellBits)),
      get_circuit_(circuit::map_get(cells, kCellBits)),
      chain_(chain_options(opt)) {
  thread_ = std::thread([this] { worker(); });
}

MapSession::~MapSession() {
  {
    std::lock_guard lk(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  thread_.join();
}

void MapSession::enqueue(Task t) {
  {
    std::lock_guard lk(mu_);
    if (stopping_) throw ApiError(503, "session is shutting down");
    queue_.push_back(std::move(t));
  }
  cv_.notify_one();
}

void MapSession::worker() {
  for (;;) {
    Task t;
    {
      std::unique_lock lk(mu_);
      cv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;  // stopping with nothing left
      t = std::move(queue_.front());
      queue_.pop_front();
    }
    t();
  }
}

void MapSession::publish(const Event& e) {
  std::vector<Listener> ls;
  {
    std::lock_guard lk(mu_);
    for (const auto& [_, l] : listeners_) ls.push_back(l);
  }
  for (const auto& l : ls) l(e);
}

std::uint64_t MapSession::subscribe(Listener l) {
  std::lock_guard lk(mu_);
  const auto token = next_listener_++;
  listeners_.emplace(token, std::move(l));
  return token;
}

void MapSession::unsubscribe(std::uint64_t token) {
  std::lock_guard lk(mu_);
  listeners_.erase(token);
}

std::uint64_t MapSession::executions() const {
  std::lock_guard lk(mu_);
  return executions_;
}

void MapSession::check_cell(std::uint32_t cell) const {
  if (cell >= cells_) {
    throw ApiError(400, "cell " + std::to_string(cell) + " is outside the map (0.." +
                            std::to_string(cells_ - 1) + ")");
  }
}

protocol::ExecutionResult MapSession::execute(const std::string& op, std::uint64_t request,
                                              std::optional<std::uint32_t> user,
                                              const circuit::CircuitIR& c, const Bits& gen_in,
                                              const Bits& evl_in) {
  Event started{"started", op, request, user, {}, {}, {}};
  publish(started);
  auto r = chain_.run(c, gen_in, evl_in);
  {
    std::lock_guard lk(mu_);
    ++executions_;
  }
  if (!r.ok()) {
    const auto abort = r.abort();
    publish(Event{"aborted", op, request, user, abort, {}, {}});
    const std::string where =
        abort ? "phase " + std::to_string(abort->phase) + " abort: " + abort->detail : "abort";
    throw ApiError(502, "protocol execution failed (" + where + ")", abort);
  }
  return r;
}

void MapSession::start() {
  std::promise<void> done;
  auto fut = done.get_future();
  std::uint64_t request;
  {
    std::lock_guard lk(mu_);
    request = next_request_++;
  }
  enqueue([&, request] {
    try {
      // One generator bit anchors the constant-zero wires.
      execute("start", request, std::nullopt, circuit::map_start(cells_, kCellBits), Bits{0}, {});
      publish(Event{"completed", "start", request, std::nullopt, {}, std::nullopt, std::nullopt});
      done.set_value();
    } catch (...) {
      done.set_exception(std::current_exception());
    }
  });
  fut.get();
}

void MapSession::set(std::uint32_t user, std::uint32_t cell,
                     std::function<void(std::variant<SetResult, ApiError>)> done) {
  if (user < 1 || user > kMaxUser) throw ApiError(400, "user id must be 1..255");
  check_cell(cell);
  std::uint64_t request;
  {
    std::lock_guard lk(mu_);
    request = next_request_++;
  }
  enqueue([this, user, cell, request, done = std::move(done)] {
    try {
      Bits in = bits_from_uint(user, kCellBits);
      const Bits idx = bits_from_uint(cell, index_bits_);
      in.insert(in.end(), idx.begin(), idx.end());
      const auto r = execute("set", request, user, set_circuit_, {}, in);
      const auto before = static_cast<std::uint32_t>(uint_from_bits(r.evl.report.output));
      SetResult res;
      res.moved = before == 0 || before == user;
      if (!res.moved) res.occupied_by = before;
      Event e{"completed", "set", request, user, {}, res.moved ? "moved" : "occupied", {}};
      if (!res.moved) e.value = before;
      publish(e);
      done(res);
    } catch (const ApiError& e) {
      done(e);
    } catch (const std::exception& e) {
      done(ApiError(500, e.what()));
    }
  });
}

void MapSession::get(std::uint32_t cell,
                     std::function<void(std::variant<std::uint32_t, ApiError>)> done,
                     std::optional<std::uint32_t> user) {
  check_cell(cell);
  std::uint64_t request;
  {
    std::lock_guard lk(mu_);
    request = next_request_++;
  }
  enqueue([this, cell, request, user, done = std::move(done)] {
    try {
      const auto r = execute("get", request, user, get_circuit_, {}, bits_from_uint(cell, index_bits_));
      const auto v = static_cast<std::uint32_t>(uint_from_bits(r.evl.report.output));
      publish(Event{"completed", "get", request, user, {}, std::to_string(v), v});
      done(v);
    } catch (const ApiError& e) {
      done(e);
    } catch (const std::exception& e) {
      done(ApiError(500, e.what()));
    }
  });
}

SetResult MapSession::set(std::uint32_t user, std::uint32_t cell) {
  std::promise<std::variant<SetResult, ApiError>> p;
  auto f = p.get_future();
  set(user, cell, [&](std::variant<SetResult, ApiError> v) { p.set_value(std::move(v)); });
  auto v = f.get();
  if (auto* e = std::get_if<ApiError>(&v)) throw *e;
  return std::get<SetResult>(v);
}

std::uint32_t MapSession::get(std::uint32_t cell) {
  std::promise<std::variant<std::uint32_t, ApiError>> p;
  auto f = p.get_future();
  get(cell, [&](std::variant<std::uint32_t, ApiError> v) { p.set_value(std::move(v)); });
  auto v = f.get();
  if (auto* e = std::get_if<ApiError>(&v)) throw *e;
  return std::get<std::uint32_t>(v);
}

// ---------------------------------------------------------------------------

MapService::MapService(ServiceOptions opt) : opt_(std::move(opt)) {}

std::shared_ptr<MapSession> MapService::create(std::uint32_t cells, const std::string& id) {
  if (cells < 1 || cells > kMaxCells) {
    throw ApiError(400, "cells must be 1.." + std::to_string(kMaxCells));
  }
  std::string sid = id;
  {
    std::lock_guard lk(mu_);
    if (sid.empty()) {
      do {
        sid = "m" + std::to_string(next_session_++);
      } while (sessions_.count(sid));
    } else if (sessions_.count(sid)) {
      throw ApiError(409, "session '" + sid + "' already has a map");
    }
    sessions_[sid] = nullptr;  // reserve while map_start runs
  }
  ServiceOptions o = opt_;
  if (o.seed) o.seed = *o.seed ^ Block{std::hash<std::string>{}(sid), 0};
  try {
    auto s = std::make_shared<MapSession>(sid, cells, o);
    s->start();
    std::lock_guard lk(mu_);
    sessions_[sid] = s;
    return s;
  } catch (...) {
    std::lock_guard lk(mu_);
    sessions_.erase(sid);
    throw;
  }
}

std::shared_ptr<MapSession> MapService::session(const std::string& id) const {
  std::lock_guard lk(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end() || !it->second) throw ApiError(404, "no session '" + id + "'");
  return it->second;
}

User MapService::register_user(const std::string& name) {
  if (name.empty() || name.size() > 64) throw ApiError(400, "name must be 1..64 characters");
  std::lock_guard lk(mu_);
  if (by_id_.size() >= kMaxUser) throw ApiError(409, "all 255 user ids are taken");
  User u;
  u.id = static_cast<std::uint32_t>(by_id_.size() + 1);
  u.name = name;
  std::uint8_t raw[16];
  crypto::os_random_block().to_bytes(raw);
  u.token = to_hex(raw);
  by_id_[u.id] = u;
  by_token_[u.token] = u;
  return u;
}

User MapService::authenticate(const std::string& token) const {
  std::lock_guard lk(mu_);
  const auto it = by_token_.find(token);
  if (it == by_token_.end()) throw ApiError(401, "unknown or missing bearer token");
  return it->second;
}

std::optional<User> MapService::user(std::uint32_t id) const {
  std::lock_guard lk(mu_);
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

}  // namespace pgc::friendfinder
