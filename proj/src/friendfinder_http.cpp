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

#include <atomic>
#include <charconv>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "json.hpp"
#include "pgc/friendfinder.hpp"

namespace pgc::friendfinder {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

constexpr std::size_t kBodyLimit = 64 * 1024;

Response make_response(const Request& req, http::status status, const json& body) {
  Response res{status, req.version()};
  res.set(http::field::server, "pgc-friendfinder");
  res.set(http::field::content_type, "application/json");
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

Response error_response(const Request& req, const ApiError& e) {
  json j{{"error", e.what()}};
  if (e.abort()) {
    j["phase"] = e.abort()->phase;
    j["kind"] = std::string(transport::abort_kind_name(e.abort()->kind));
  }
  return make_response(req, static_cast<http::status>(e.status()), j);
}

struct Target {
  std::vector<std::string> parts;
  std::map<std::string, std::string> query;
};

Target parse_target(std::string_view t) {
  Target out;
  const auto q = t.find('?');
  const std::string_view path = t.substr(0, q);
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto slash = path.find('/', pos);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > pos) out.parts.emplace_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  if (q != std::string_view::npos) {
    std::size_t at = q + 1;
    while (at < t.size()) {
      std::size_t end = t.find('&', at);
      if (end == std::string_view::npos) end = t.size();
      const std::string_view kv(t.data() + at, end - at);
      for (std::size_t i = 0; i < kv.size(); ++i) {
        if (kv[i] != '=') continue;
        out.query[std::string(kv.substr(0, i))] = std::string(kv.substr(i + 1));
        break;
      }
      at = end + 1;
    }
  }
  return out;
}

std::uint32_t parse_index(const std::string& s, const char* what) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ApiError(400, std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

std::uint32_t json_uint(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_number_unsigned()) {
    throw ApiError(400, std::string("field '") + key + "' must be a non-negative integer");
  }
  const auto v = body[key].get<std::uint64_t>();
  if (v > 0xffffffffu) throw ApiError(400, std::string("field '") + key + "' is too large");
  return static_cast<std::uint32_t>(v);
}

std::string bearer(const Request& req, const Target& t) {
  const auto it = req.find(http::field::authorization);
  if (it != req.end()) {
    const std::string_view v(it->value().data(), it->value().size());
    if (v.rfind("Bearer ", 0) == 0) return std::string(v.substr(7));
  }
  if (auto q = t.query.find("token"); q != t.query.end()) return q->second;
  return {};
}

// ---------------------------------------------------------------------------

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<MapSession> map)
      : ws_(std::move(socket)), map_(std::move(map)) {}

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = shared_from_this();
    auto exec = ws_.get_executor();
    token_ = map_->subscribe([weak, exec](const Event& e) {
      net::post(exec, [weak, msg = e.to_json()] {
        if (auto self = weak.lock()) self->push(msg);
      });
    });
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      // Closed by the client or failed: stop receiving events.
      map_->unsubscribe(token_);
      return;
    }
    buffer_.consume(buffer_.size());  // clients have nothing to say
    do_read();
  }

  void push(std::string msg) {
    queue_.push_back(std::move(msg));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      map_->unsubscribe(token_);
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<MapSession> map_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::uint64_t token_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, MapService& svc) : stream_(std::move(socket)), svc_(svc) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(kBodyLimit);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return close();
    if (ec) return;
    req_ = parser_->release();
    const Target target = parse_target(std::string_view(req_.target().data(), req_.target().size()));

    if (websocket::is_upgrade(req_)) {
      try {
        if (target.parts.size() != 3 || target.parts[0] != "session" || target.parts[2] != "events") {
          throw ApiError(404, "no WebSocket endpoint here");
        }
        svc_.authenticate(bearer(req_, target));
        auto map = svc_.session(target.parts[1]);
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), std::move(map))->run(std::move(req_));
      } catch (const ApiError& e) {
        send(error_response(req_, e));
      }
      return;
    }

    try {
      route(target);
    } catch (const ApiError& e) {
      send(error_response(req_, e));
    } catch (const std::exception& e) {
      send(error_response(req_, ApiError(500, e.what())));
    }
  }

  // Completes from any thread.
  void reply_later(Response res) {
    net::post(stream_.get_executor(),
              [self = shared_from_this(), res = std::move(res)]() mutable { self->send(std::move(res)); });
  }

  json body_json() const {
    try {
      return req_.body().empty() ? json::object() : json::parse(req_.body());
    } catch (const json::exception&) {
      throw ApiError(400, "request body is not valid JSON");
    }
  }

  void route(const Target& t) {
    const auto& p = t.parts;
    const auto method = req_.method();
    if (method == http::verb::options) {
      Response res = make_response(req_, http::status::no_content, json::object());
      res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
      res.set(http::field::access_control_allow_headers, "Authorization, Content-Type");
      res.body().clear();
      res.prepare_payload();
      return send(std::move(res));
    }
    if (method == http::verb::post && p.size() == 1 && p[0] == "users") {
      const auto body = body_json();
      if (!body.contains("name") || !body["name"].is_string()) {
        throw ApiError(400, "field 'name' must be a string");
      }
      const User u = svc_.register_user(body["name"].get<std::string>());
      return send(make_response(req_, http::status::created,
                                {{"user", u.id}, {"name", u.name}, {"token", u.token}}));
    }

    const User caller = svc_.authenticate(bearer(req_, t));
    if (method == http::verb::post && p.size() == 1 && p[0] == "session") {
      const auto body = body_json();
      const std::uint32_t cells = body.contains("cells") ? json_uint(body, "cells") : 64;
      std::string id;
      if (body.contains("session")) {
        if (!body["session"].is_string()) throw ApiError(400, "field 'session' must be a string");
        id = body["session"].get<std::string>();
      }
      // map_start is a full protocol execution; keep it off the I/O thread.
      std::thread([self = shared_from_this(), cells, id] {
        try {
          const auto s = self->svc_.create(cells, id);
          self->reply_later(make_response(self->req_, http::status::created,
                                          {{"session", s->id()}, {"cells", s->cells()}}));
        } catch (const ApiError& e) {
          self->reply_later(error_response(self->req_, e));
        } catch (const std::exception& e) {
          self->reply_later(error_response(self->req_, ApiError(500, e.what())));
        }
      }).detach();
      return;
    }
    if (p.size() >= 2 && p[0] == "session") {
      const auto map = svc_.session(p[1]);
      if (method == http::verb::get && p.size() == 2) {
        return send(make_response(req_, http::status::ok,
                                  {{"session", map->id()},
                                   {"cells", map->cells()},
                                   {"executions", map->executions()}}));
      }
      if (method == http::verb::post && p.size() == 3 && p[2] == "set") {
        const auto body = body_json();
        const std::uint32_t user = body.contains("user") ? json_uint(body, "user") : caller.id;
        if (user != caller.id) throw ApiError(403, "a token may only move its own user");
        const std::uint32_t cell = json_uint(body, "cell");
        map->set(user, cell, [self = shared_from_this()](std::variant<SetResult, ApiError> v) {
          if (auto* e = std::get_if<ApiError>(&v)) return self->reply_later(error_response(self->req_, *e));
          const auto& r = std::get<SetResult>(v);
          json j{{"result", r.moved ? "moved" : "occupied"}};
          if (!r.moved) {
            j["occupied_by"] = r.occupied_by;
            if (auto u = self->svc_.user(r.occupied_by)) j["occupied_by_name"] = u->name;
          }
          self->reply_later(make_response(self->req_, http::status::ok, j));
        });
        return;
      }
      if (method == http::verb::get && p.size() == 4 && p[2] == "cell") {
        const std::uint32_t cell = parse_index(p[3], "cell index");
        map->get(
            cell,
            [self = shared_from_this()](std::variant<std::uint32_t, ApiError> v) {
              if (auto* e = std::get_if<ApiError>(&v)) return self->reply_later(error_response(self->req_, *e));
              self->reply_later(make_response(self->req_, http::status::ok, {{"value", std::get<std::uint32_t>(v)}}));
            },
            caller.id);
        return;
      }
    }
    throw ApiError(404, "no route for " + std::string(req_.method_string()) + " " +
                            std::string(req_.target()));
  }

  void send(Response res) {
    res_ = std::make_shared<Response>(std::move(res));
    http::async_write(stream_, *res_,
                      beast::bind_front_handler(&HttpSession::on_write, shared_from_this(),
                                                res_->need_eof()));
  }

  void on_write(bool close_after, beast::error_code ec, std::size_t) {
    if (ec) return;
    if (close_after) return close();
    res_.reset();
    do_read();
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  MapService& svc_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Request req_;
  std::shared_ptr<Response> res_;
};

}  // namespace

struct HttpServer::Impl {
  MapService& svc;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;

  Impl(MapService& s, const std::string& address, std::uint16_t port)
      : svc(s), acceptor(net::make_strand(ioc)) {
    const tcp::endpoint ep{net::ip::make_address(address), port};
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen(net::socket_base::max_listen_connections);
  }

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
      } else {
        std::make_shared<HttpSession>(std::move(socket), svc)->run();
      }
      do_accept();
    });
  }
};

HttpServer::HttpServer(MapService& service, const std::string& address, std::uint16_t port,
                       unsigned threads)
    : impl_(std::make_unique<Impl>(service, address, port)) {
  impl_->do_accept();
  for (unsigned i = 0; i < std::max(1u, threads); ++i) {
    impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  }
}

HttpServer::~HttpServer() { stop(); }

std::uint16_t HttpServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void HttpServer::stop() {
  {
    std::lock_guard lk(impl_->mu);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  impl_->ioc.stop();
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
  impl_->cv.notify_all();
}

void HttpServer::wait() {
  std::unique_lock lk(impl_->mu);
  impl_->cv.wait(lk, [&] { return impl_->stopped; });
}

}  // namespace pgc::friendfinder
