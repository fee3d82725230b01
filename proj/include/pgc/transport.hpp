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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "pgc/common.hpp"

namespace pgc::transport {

/// length(4) phase(1) type(1) exec_id(8) payload. The length field counts
/// everything after itself.
struct Frame {
  std::uint8_t phase = 1;
  std::uint8_t type = 0;
  std::uint64_t exec_id = 0;
  Bytes payload;

  bool operator==(const Frame&) const = default;
  std::size_t wire_size() const { return 14 + payload.size(); }
};

inline constexpr std::size_t kLengthBytes = 4;
inline constexpr std::size_t kHeaderRemainder = 10;
inline constexpr std::size_t kDefaultMaxPayload = std::size_t{256} << 20;
inline constexpr std::uint8_t kAbortType = 0xFF;

class FrameError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ProtocolOrderError : public FormatError {
 public:
  using FormatError::FormatError;
};

Bytes encode_frame(const Frame& f);
/// Decodes exactly one frame occupying all of `bytes`.
Frame decode_frame(std::span<const std::uint8_t> bytes,
                   std::size_t max_payload = kDefaultMaxPayload);

/// Reliable ordered byte stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::span<const std::uint8_t> data) = 0;
  /// Fills `out` completely or throws.
  virtual void read_exact(std::span<std::uint8_t> out) = 0;
  virtual void close() = 0;
};

/// Two connected in-process endpoints.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe();

std::unique_ptr<ByteStream> tcp_connect(const std::string& host, std::uint16_t port,
                                        int timeout_ms = 30000);

class TcpListener {
 public:
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  std::uint16_t port() const { return port_; }
  std::unique_ptr<ByteStream> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// "host:port" -> pair. Throws on a malformed endpoint.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

enum class AbortKind : std::uint8_t {
  kProtocol = 1,
  kConfig = 2,
  kCheatGenerator = 3,
  kCheatCloud = 4,
  kCheatEvaluator = 5,
  kUnreliableOutput = 6,
  kState = 7,
};

std::string_view abort_kind_name(AbortKind k);
bool is_cheating(AbortKind k);

/// Terminal failure of an execution, raised locally or received from a peer.
class ProtocolAbort : public Error {
 public:
  ProtocolAbort(AbortKind kind, std::uint8_t phase, std::string detail, bool remote = false);
  AbortKind kind() const { return kind_; }
  std::uint8_t phase() const { return phase_; }
  const std::string& detail() const { return detail_; }
  bool remote() const { return remote_; }

 private:
  AbortKind kind_;
  std::uint8_t phase_;
  std::string detail_;
  bool remote_;
};

/// Framed, counted, phase-checked connection to one peer.
class Link {
 public:
  Link(std::unique_ptr<ByteStream> stream, std::string peer_name);

  void set_exec_id(std::uint64_t id) { exec_id_ = id; }
  void set_max_payload(std::size_t n) { max_payload_ = n; }
  /// Appends every sent frame, encoded, to `path`.
  void record_transcript(const std::filesystem::path& path);

  void send(std::uint8_t phase, std::uint8_t type, Bytes payload);
  Frame recv();
  /// recv() that turns abort frames into ProtocolAbort and rejects anything
  /// but (phase, type).
  Frame expect(std::uint8_t phase, std::uint8_t type);
  void send_abort(std::uint8_t phase, AbortKind kind, const std::string& detail);

  std::uint64_t bytes_sent() const { return bytes_sent_; }
  std::uint64_t bytes_received() const { return bytes_received_; }
  std::uint64_t frames_sent() const { return frames_sent_; }
  const std::string& peer() const { return peer_; }
  void close() { stream_->close(); }

 private:
  std::unique_ptr<ByteStream> stream_;
  std::string peer_;
  std::uint64_t exec_id_ = 0;
  std::size_t max_payload_ = kDefaultMaxPayload;
  std::map<std::uint64_t, std::uint8_t> last_sent_phase_;
  std::map<std::uint64_t, std::uint8_t> last_recv_phase_;
  std::uint64_t bytes_sent_ = 0;
  std::uint64_t bytes_received_ = 0;
  std::uint64_t frames_sent_ = 0;
  std::unique_ptr<std::ofstream> transcript_;
};

/// Offline checks over a recorded transcript.
struct ReplayReport {
  bool ok = true;
  std::size_t frames = 0;
  std::uint64_t bytes = 0;
  std::size_t failing_frame = 0;  // valid when !ok
  std::string failure;
  std::vector<std::uint8_t> phases;  // per frame
  std::vector<std::uint8_t> types;
};

ReplayReport replay_transcript(std::span<const std::uint8_t> data,
                               std::size_t max_payload = kDefaultMaxPayload);
/// Reads the file and replays it. Throws Error when it cannot be read.
ReplayReport replay_transcript_file(const std::filesystem::path& path,
                                    std::size_t max_payload = kDefaultMaxPayload);

}  // namespace pgc::transport
