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

#include "pgc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>

namespace pgc::transport {

Bytes encode_frame(const Frame& f) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(f.payload.size() + kHeaderRemainder));
  w.u8(f.phase);
  w.u8(f.type);
  w.u64(f.exec_id);
  w.bytes(f.payload);
  return std::move(w).take();
}

namespace {

void check_header(std::uint32_t length, std::uint8_t phase, std::size_t max_payload) {
  if (length < kHeaderRemainder) throw FrameError("frame length below header size");
  if (length - kHeaderRemainder > max_payload) {
    throw FrameError("frame payload of " + std::to_string(length - kHeaderRemainder) +
                     " bytes exceeds the cap of " + std::to_string(max_payload));
  }
  if (phase < 1 || phase > 7) throw FrameError("bad phase tag " + std::to_string(phase));
}

}  // namespace

Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t max_payload) {
  ByteReader r(bytes);
  const std::uint32_t length = r.u32();
  Frame f;
  f.phase = r.u8();
  f.type = r.u8();
  f.exec_id = r.u64();
  check_header(length, f.phase, max_payload);
  const auto body = r.bytes(length - kHeaderRemainder);
  f.payload.assign(body.begin(), body.end());
  r.expect_done("frame");
  return f;
}

// ---------------------------------------------------------------------------

namespace {

struct PipeBuffer {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> data;
  bool closed = false;
};

class PipeEnd : public ByteStream {
 public:
  PipeEnd(std::shared_ptr<PipeBuffer> in, std::shared_ptr<PipeBuffer> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~PipeEnd() override { close(); }

  void write(std::span<const std::uint8_t> d) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw Error("pipe closed");
    out_->data.insert(out_->data.end(), d.begin(), d.end());
    out_->cv.notify_all();
  }

  void read_exact(std::span<std::uint8_t> out) override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return in_->data.size() >= out.size() || in_->closed; });
    if (in_->data.size() < out.size()) throw Error("connection closed by peer");
    std::copy_n(in_->data.begin(), out.size(), out.begin());
    in_->data.erase(in_->data.begin(), in_->data.begin() + static_cast<std::ptrdiff_t>(out.size()));
  }

  void close() override {
    for (auto* b : {in_.get(), out_.get()}) {
      std::lock_guard lock(b->mu);
      b->closed = true;
      b->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<PipeBuffer> in_;
  std::shared_ptr<PipeBuffer> out_;
};

class TcpStream : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpStream() override { close(); }

  void write(std::span<const std::uint8_t> d) override {
    std::size_t off = 0;
    while (off < d.size()) {
      const ssize_t n = ::send(fd_, d.data() + off, d.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw Error(std::string("tcp send failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(n);
    }
  }

  void read_exact(std::span<std::uint8_t> out) override {
    std::size_t off = 0;
    while (off < out.size()) {
      const ssize_t n = ::recv(fd_, out.data() + off, out.size() - off, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n == 0) throw Error("connection closed by peer");
      if (n < 0) throw Error(std::string("tcp recv failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(n);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

addrinfo* resolve(const std::string& host, std::uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string p = std::to_string(port);
  if (::getaddrinfo(host.empty() ? nullptr : host.c_str(), p.c_str(), &hints, &res) != 0 ||
      res == nullptr) {
    throw Error("cannot resolve " + host);
  }
  return res;
}

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe() {
  auto a = std::make_shared<PipeBuffer>();
  auto b = std::make_shared<PipeBuffer>();
  return {std::make_unique<PipeEnd>(a, b), std::make_unique<PipeEnd>(b, a)};
}

std::unique_ptr<ByteStream> tcp_connect(const std::string& host, std::uint16_t port,
                                        int timeout_ms) {
  // Retry until the listener is up; peers are usually started together.
  const int step_ms = 50;
  for (int waited = 0;; waited += step_ms) {
    addrinfo* res = resolve(host, port, false);
    const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const int rc = fd < 0 ? -1 : ::connect(fd, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc == 0) return std::make_unique<TcpStream>(fd);
    if (fd >= 0) ::close(fd);
    if (waited >= timeout_ms) {
      throw Error("cannot connect to " + host + ":" + std::to_string(port));
    }
    ::usleep(step_ms * 1000);
  }
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  addrinfo* res = resolve(host, port, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const bool ok = fd_ >= 0 && ::bind(fd_, res->ai_addr, res->ai_addrlen) == 0 &&
                  ::listen(fd_, 8) == 0;
  ::freeaddrinfo(res);
  if (!ok) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<ByteStream> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpStream>(fd);
    if (errno != EINTR) throw Error(std::string("accept failed: ") + std::strerror(errno));
  }
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error("endpoint must be host:port, got '" + text + "'");
  std::uint16_t port = 0;
  const char* b = text.data() + colon + 1;
  const char* e = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(b, e, port);
  if (ec != std::errc() || ptr != e) throw Error("bad port in '" + text + "'");
  return {text.substr(0, colon), port};
}

// ---------------------------------------------------------------------------

std::string_view abort_kind_name(AbortKind k) {
  switch (k) {
    case AbortKind::kProtocol:
      return "protocol";
    case AbortKind::kConfig:
      return "config";
    case AbortKind::kCheatGenerator:
      return "cheating-generator";
    case AbortKind::kCheatCloud:
      return "cheating-cloud";
    case AbortKind::kCheatEvaluator:
      return "cheating-evaluator";
    case AbortKind::kUnreliableOutput:
      return "unreliable-output";
    case AbortKind::kState:
      return "state";
  }
  return "unknown";
}

bool is_cheating(AbortKind k) {
  return k == AbortKind::kCheatGenerator || k == AbortKind::kCheatCloud ||
         k == AbortKind::kCheatEvaluator;
}

ProtocolAbort::ProtocolAbort(AbortKind kind, std::uint8_t phase, std::string detail, bool remote)
    : Error("phase " + std::to_string(phase) + " abort (" + std::string(abort_kind_name(kind)) +
            (remote ? ", reported by peer" : "") + "): " + detail),
      kind_(kind),
      phase_(phase),
      detail_(std::move(detail)),
      remote_(remote) {}

Link::Link(std::unique_ptr<ByteStream> stream, std::string peer_name)
    : stream_(std::move(stream)), peer_(std::move(peer_name)) {}

void Link::record_transcript(const std::filesystem::path& path) {
  transcript_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
  if (!*transcript_) throw Error("cannot open transcript " + path.string());
}

void Link::send(std::uint8_t phase, std::uint8_t type, Bytes payload) {
  auto& last = last_sent_phase_[exec_id_];
  if (phase < last) {
    throw ProtocolOrderError("phase regression on send to " + peer_ + ": " +
                             std::to_string(last) + " then " + std::to_string(phase));
  }
  last = phase;
  Frame f{phase, type, exec_id_, std::move(payload)};
  check_header(static_cast<std::uint32_t>(f.payload.size() + kHeaderRemainder), phase,
               max_payload_);
  const Bytes wire = encode_frame(f);
  stream_->write(wire);
  if (transcript_) {
    transcript_->write(reinterpret_cast<const char*>(wire.data()),
                       static_cast<std::streamsize>(wire.size()));
    transcript_->flush();
  }
  bytes_sent_ += wire.size();
  ++frames_sent_;
}

Frame Link::recv() {
  std::uint8_t head[kLengthBytes + kHeaderRemainder];
  stream_->read_exact(head);
  ByteReader r(head);
  const std::uint32_t length = r.u32();
  Frame f;
  f.phase = r.u8();
  f.type = r.u8();
  f.exec_id = r.u64();
  check_header(length, f.phase, max_payload_);
  f.payload.resize(length - kHeaderRemainder);
  stream_->read_exact(f.payload);
  bytes_received_ += sizeof head + f.payload.size();
  auto& last = last_recv_phase_[f.exec_id];
  if (f.phase < last) {
    throw ProtocolOrderError("phase regression from " + peer_ + ": " + std::to_string(last) +
                             " then " + std::to_string(f.phase));
  }
  last = f.phase;
  return f;
}

Frame Link::expect(std::uint8_t phase, std::uint8_t type) {
  Frame f = recv();
  if (f.type == kAbortType) {
    ByteReader r(f.payload);
    const auto kind = static_cast<AbortKind>(r.u8());
    const Bytes msg = r.var_bytes();
    throw ProtocolAbort(kind, f.phase, peer_ + ": " + std::string(msg.begin(), msg.end()), true);
  }
  if (f.exec_id != exec_id_) {
    throw ProtocolAbort(AbortKind::kProtocol, phase,
                        "frame from " + peer_ + " belongs to execution " +
                            std::to_string(f.exec_id));
  }
  if (f.phase != phase || f.type != type) {
    throw ProtocolAbort(AbortKind::kProtocol, phase,
                        "unexpected frame from " + peer_ + " (phase " +
                            std::to_string(f.phase) + ", type " + std::to_string(f.type) +
                            "; wanted phase " + std::to_string(phase) + ", type " +
                            std::to_string(type) + ")");
  }
  return f;
}

void Link::send_abort(std::uint8_t phase, AbortKind kind, const std::string& detail) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind));
  w.var_bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(detail.data()),
                                            detail.size()));
  const auto last = last_sent_phase_[exec_id_];
  send(std::max(phase, last), kAbortType, std::move(w).take());
}

ReplayReport replay_transcript(std::span<const std::uint8_t> data, std::size_t max_payload) {
  ReplayReport rep;
  std::map<std::uint64_t, std::uint8_t> last;
  std::size_t pos = 0;
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.failing_frame = rep.frames;
    rep.failure = "frame " + std::to_string(rep.frames) + ": " + std::move(why);
    return rep;
  };
  while (pos < data.size()) {
    if (data.size() - pos < kLengthBytes + kHeaderRemainder) return fail("truncated header");
    ByteReader r(data.subspan(pos, kLengthBytes));
    const std::uint32_t length = r.u32();
    if (length < kHeaderRemainder || data.size() - pos - kLengthBytes < length) {
      return fail("truncated frame");
    }
    Frame f;
    try {
      f = decode_frame(data.subspan(pos, kLengthBytes + length), max_payload);
    } catch (const FormatError& e) {
      return fail(e.what());
    }
    auto& prev = last[f.exec_id];
    if (f.phase < prev) {
      return fail("phase regression " + std::to_string(prev) + " -> " + std::to_string(f.phase));
    }
    prev = f.phase;
    if (f.type == kAbortType) {
      ByteReader a(f.payload);
      const auto kind = static_cast<AbortKind>(a.u8());
      const Bytes msg = a.var_bytes();
      return fail("abort (" + std::string(abort_kind_name(kind)) + "): " +
                  std::string(msg.begin(), msg.end()));
    }
    rep.phases.push_back(f.phase);
    rep.types.push_back(f.type);
    rep.bytes += f.wire_size();
    ++rep.frames;
    pos += kLengthBytes + length;
  }
  return rep;
}

ReplayReport replay_transcript_file(const std::filesystem::path& path, std::size_t max_payload) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read transcript " + path.string());
  const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return replay_transcript(data, max_payload);
}

}  // namespace pgc::transport
