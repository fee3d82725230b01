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

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <algorithm>
#include <random>
#include <thread>

#include "json.hpp"
#include "pgc/friendfinder.hpp"

using namespace pgc;
using namespace pgc::friendfinder;
using json = nlohmann::json;

namespace {

ServiceOptions fast(std::uint64_t seed) {
  ServiceOptions o;
  o.circuits = 5;
  o.base_ot = ot::BaseOtKind::kDealer;
  o.seed = Block{seed, 3};
  return o;
}

// Plain-map reference. A user occupies one cell, so a move clears the old one.
struct Shadow {
  std::vector<std::uint32_t> cells;
  explicit Shadow(std::uint32_t n) : cells(n, 0) {}
  SetResult set(std::uint32_t user, std::uint32_t cell) {
    SetResult r;
    const auto before = cells[cell];
    r.moved = before == 0 || before == user;
    if (r.moved) {
      for (auto& c : cells) {
        if (c == user) c = 0;
      }
      cells[cell] = user;
    } else {
      r.occupied_by = before;
    }
    return r;
  }
};

}  // namespace

TEST_CASE("map session follows a plain map over random scripts") {
  MapService svc(fast(11));
  std::mt19937_64 rng(5);
  for (int script = 0; script < 100; ++script) {
    // Mostly the 64-cell map; small maps make collisions common.
    const std::uint32_t cells = script % 4 == 0 ? 1 + rng() % 8 : 64;
    auto s = svc.create(cells);
    Shadow ref(cells);
    for (int op = 0; op < 6; ++op) {
      const auto cell = static_cast<std::uint32_t>(rng() % cells);
      if (rng() % 3 == 0) {
        CHECK(s->get(cell) == ref.cells[cell]);
      } else if (cells > 8 && rng() % 2 == 0) {
        // Aim at the other user's cell to force a collision.
        const auto user = static_cast<std::uint32_t>(1 + rng() % 2);
        const auto it = std::find(ref.cells.begin(), ref.cells.end(), 3 - user);
        const auto target = it == ref.cells.end() ? cell : static_cast<std::uint32_t>(it - ref.cells.begin());
        const auto want = ref.set(user, target);
        const auto got = s->set(user, target);
        CHECK(got.moved == want.moved);
        CHECK(got.occupied_by == want.occupied_by);
      } else {
        const auto user = static_cast<std::uint32_t>(1 + rng() % 2);
        const auto want = ref.set(user, cell);
        const auto got = s->set(user, cell);
        CHECK(got.moved == want.moved);
        CHECK(got.occupied_by == want.occupied_by);
      }
    }
    CHECK(s->executions() == 7);
  }
}

TEST_CASE("concurrent sets resolve in the order the events report") {
  MapService svc(fast(12));
  auto s = svc.create(4);
  std::vector<Event> done;
  std::mutex mu;
  s->subscribe([&](const Event& e) {
    if (e.type != "completed") return;
    std::lock_guard lk(mu);
    done.push_back(e);
  });
  // Two users race for the same cells.
  auto racer = [&](std::uint32_t user) {
    for (std::uint32_t cell : {1u, 2u, 1u}) s->set(user, cell);
  };
  std::thread a(racer, 1), b(racer, 2);
  a.join();
  b.join();
  REQUIRE(done.size() == 6);
  Shadow ref(4);
  const std::uint32_t script[] = {1, 2, 1};
  std::map<std::uint32_t, int> step;
  for (const auto& e : done) {
    REQUIRE(e.user);
    const auto cell = script[step[*e.user]++];
    const auto want = ref.set(*e.user, cell);
    CHECK(*e.result == (want.moved ? "moved" : "occupied"));
  }
  CHECK(s->get(1) == ref.cells[1]);
  CHECK(s->get(2) == ref.cells[2]);
}

TEST_CASE("service errors") {
  MapService svc(fast(13));
  auto s = svc.create(8, "room");
  CHECK_THROWS_AS(svc.create(8, "room"), ApiError);
  try {
    svc.create(8, "room");
  } catch (const ApiError& e) {
    CHECK(e.status() == 409);
  }
  auto status_of = [](auto&& f) {
    try {
      f();
    } catch (const ApiError& e) {
      return e.status();
    }
    return 0;
  };
  CHECK(status_of([&] { s->set(1, 8); }) == 400);
  CHECK(status_of([&] { s->set(0, 1); }) == 400);
  CHECK(status_of([&] { s->get(100); }) == 400);
  CHECK(status_of([&] { svc.create(0); }) == 400);
  CHECK(status_of([&] { svc.session("nope"); }) == 404);
  CHECK(status_of([&] { svc.authenticate("bad"); }) == 401);
  const auto u = svc.register_user("ann");
  CHECK(u.id == 1);
  CHECK(svc.authenticate(u.token).id == 1);
  // Rejected requests never reach the engine.
  CHECK(s->executions() == 1);
}

// ---------------------------------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct Reply {
  int status = 0;
  json body;
};

Reply call(std::uint16_t port, http::verb verb, const std::string& target, const json& body,
           const std::string& token = "") {
  net::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect({net::ip::make_address("127.0.0.1"), port});
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "127.0.0.1");
  if (!token.empty()) req.set(http::field::authorization, "Bearer " + token);
  if (!body.is_null()) {
    req.set(http::field::content_type, "application/json");
    req.body() = body.dump();
  }
  req.prepare_payload();
  http::write(sock, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(sock, buf, res);
  Reply r;
  r.status = static_cast<int>(res.result_int());
  r.body = res.body().empty() ? json() : json::parse(res.body());
  return r;
}

}  // namespace

TEST_CASE("http and websocket gateway") {
  MapService svc(fast(14));
  HttpServer server(svc, "127.0.0.1", 0, 2);
  const auto port = server.port();
  REQUIRE(port != 0);

  const auto ann = call(port, http::verb::post, "/users", {{"name", "ann"}});
  REQUIRE(ann.status == 201);
  const std::string tok = ann.body["token"];
  const auto bob = call(port, http::verb::post, "/users", {{"name", "bob"}});
  const std::string tok2 = bob.body["token"];

  CHECK(call(port, http::verb::post, "/session", {{"cells", 8}}).status == 401);
  auto created = call(port, http::verb::post, "/session", {{"cells", 8}, {"session", "s1"}}, tok);
  REQUIRE(created.status == 201);
  CHECK(created.body["session"] == "s1");
  CHECK(call(port, http::verb::post, "/session", {{"cells", 8}, {"session", "s1"}}, tok).status ==
        409);
  CHECK(call(port, http::verb::get, "/session/zz", nullptr, tok).status == 404);

  // Subscribe before acting so every event is seen.
  net::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect({net::ip::make_address("127.0.0.1"), port});
  beast::websocket::stream<tcp::socket> ws(std::move(sock));
  ws.handshake("127.0.0.1", "/session/s1/events?token=" + tok);

  auto set = call(port, http::verb::post, "/session/s1/set", {{"cell", 3}}, tok);
  REQUIRE(set.status == 200);
  CHECK(set.body["result"] == "moved");
  set = call(port, http::verb::post, "/session/s1/set", {{"cell", 3}}, tok2);
  CHECK(set.body["result"] == "occupied");
  CHECK(set.body["occupied_by"] == 1);
  CHECK(call(port, http::verb::post, "/session/s1/set", {{"cell", 3}, {"user", 1}}, tok2).status ==
        403);
  CHECK(call(port, http::verb::post, "/session/s1/set", {{"cell", 9}}, tok).status == 400);
  const auto cell = call(port, http::verb::get, "/session/s1/cell/3", nullptr, tok);
  CHECK(cell.status == 200);
  CHECK(cell.body["value"] == 1);

  std::vector<json> events;
  while (events.size() < 6) {
    beast::flat_buffer b;
    ws.read(b);
    events.push_back(json::parse(beast::buffers_to_string(b.data())));
  }
  CHECK(events[0]["type"] == "started");
  CHECK(events[1]["type"] == "completed");
  CHECK(events[1]["result"] == "moved");
  CHECK(events[3]["result"] == "occupied");
  CHECK(events[5]["op"] == "get");
  ws.close(beast::websocket::close_code::normal);

  const auto info = call(port, http::verb::get, "/session/s1", nullptr, tok);
  CHECK(info.body["executions"] == 4);
  server.stop();
}
