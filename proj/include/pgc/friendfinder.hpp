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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>

#include "pgc/protocol.hpp"

namespace pgc::friendfinder {

inline constexpr std::uint32_t kCellBits = 8;
inline constexpr std::uint32_t kMaxUser = 255;
inline constexpr std::uint32_t kMaxCells = 1024;

struct ServiceOptions {
  std::uint32_t circuits = 5;
  unsigned label_bits = 80;
  ot::BaseOtKind base_ot = ot::BaseOtKind::kGroup;
  std::optional<Block> seed;  // deterministic engine randomness (tests)
};

/// HTTP-facing failure: status code plus message.
class ApiError : public Error {
 public:
  ApiError(int status, const std::string& msg, std::optional<protocol::AbortInfo> abort = {})
      : Error(msg), status_(status), abort_(std::move(abort)) {}
  int status() const { return status_; }
  const std::optional<protocol::AbortInfo>& abort() const { return abort_; }

 private:
  int status_;
  std::optional<protocol::AbortInfo> abort_;
};

struct SetResult {
  bool moved = false;
  std::uint32_t occupied_by = 0;  // valid when !moved
};

/// Pushed to subscribers: "started", "completed" or "aborted".
struct Event {
  std::string type;
  std::string op;  // "start", "set" or "get"
  std::uint64_t request = 0;
  std::optional<std::uint32_t> user;  // requesting user, when known
  std::optional<protocol::AbortInfo> abort;
  std::optional<std::string> result;  // "moved", "occupied" or the cell value
  std::optional<std::uint32_t> value;

  std::string to_json() const;
};

/// One map: a computation chain whose saved wires hold the cells. Requests
/// run one at a time in arrival order on a worker thread.
class MapSession {
 public:
  using Listener = std::function<void(const Event&)>;

  MapSession(std::string id, std::uint32_t cells, const ServiceOptions& opt);
  ~MapSession();
  MapSession(const MapSession&) = delete;
  MapSession& operator=(const MapSession&) = delete;

  const std::string& id() const { return id_; }
  std::uint32_t cells() const { return cells_; }

  /// Runs map_start. Called once by the service before the session is shared.
  void start();

  void set(std::uint32_t user, std::uint32_t cell,
           std::function<void(std::variant<SetResult, ApiError>)> done);
  void get(std::uint32_t cell, std::function<void(std::variant<std::uint32_t, ApiError>)> done,
           std::optional<std::uint32_t> user = std::nullopt);

  // Blocking wrappers.
  SetResult set(std::uint32_t user, std::uint32_t cell);
  std::uint32_t get(std::uint32_t cell);

  std::uint64_t subscribe(Listener l);
  void unsubscribe(std::uint64_t token);

  /// Protocol executions run so far (start included).
  std::uint64_t executions() const;

 private:
  using Task = std::function<void()>;
  void enqueue(Task t);
  void worker();
  void publish(const Event& e);
  /// Runs one execution on the worker thread; throws ApiError on abort.
  protocol::ExecutionResult execute(const std::string& op, std::uint64_t request,
                                    std::optional<std::uint32_t> user,
                                    const circuit::CircuitIR& c, const Bits& gen_in,
                                    const Bits& evl_in);
  void check_cell(std::uint32_t cell) const;

  const std::string id_;
  const std::uint32_t cells_;
  const std::uint32_t index_bits_;
  const circuit::CircuitIR set_circuit_;
  const circuit::CircuitIR get_circuit_;
  protocol::LocalChain chain_;  // worker thread only

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Task> queue_;
  bool stopping_ = false;
  std::uint64_t next_request_ = 1;
  std::uint64_t executions_ = 0;
  std::map<std::uint64_t, Listener> listeners_;
  std::uint64_t next_listener_ = 1;
  std::thread thread_;
};

struct User {
  std::uint32_t id = 0;
  std::string name;
  std::string token;
};

/// Session and user registry shared by the HTTP layer.
class MapService {
 public:
  explicit MapService(ServiceOptions opt = {});

  /// Creates and starts a map. `id` empty picks a fresh id; an id already in
  /// use is a conflict (409).
  std::shared_ptr<MapSession> create(std::uint32_t cells, const std::string& id = "");
  /// 404 when unknown.
  std::shared_ptr<MapSession> session(const std::string& id) const;

  /// Registers a user (ids 1..255) and returns its bearer token.
  User register_user(const std::string& name);
  /// 401 when the token is unknown.
  User authenticate(const std::string& token) const;
  std::optional<User> user(std::uint32_t id) const;

  const ServiceOptions& options() const { return opt_; }

 private:
  ServiceOptions opt_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<MapSession>> sessions_;
  std::map<std::string, User> by_token_;
  std::map<std::uint32_t, User> by_id_;
  std::uint64_t next_session_ = 1;
};

/// HTTP + WebSocket gateway over a MapService.
///   POST /users {name}                  -> 201 {user, name, token}
///   POST /session {cells[, session]}    -> 201 {session, cells}
///   POST /session/{id}/set {user, cell} -> {result: moved|occupied, occupied_by?}
///   GET  /session/{id}/cell/{n}         -> {value}
///   GET  /session/{id}                  -> {session, cells, executions}
///   WS   /session/{id}/events           -> stream of Event JSON
/// Everything except POST /users needs "Authorization: Bearer <token>"
/// (or ?token= on the WebSocket URL).
class HttpServer {
 public:
  HttpServer(MapService& service, const std::string& address, std::uint16_t port,
             unsigned threads = 2);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  std::uint16_t port() const;
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pgc::friendfinder
