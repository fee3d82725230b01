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

// Friend-finder gateway: HTTP + WebSocket front end over in-process
// generator and cloud parties.

#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "pgc/friendfinder.hpp"

using namespace pgc;

int main(int argc, char** argv) {
  CLI::App app{"pgc friend-finder gateway"};
  std::string listen = "127.0.0.1:8080", base_ot = "group", seed;
  friendfinder::ServiceOptions opt;
  unsigned threads = 2;
  app.add_option("--listen", listen, "host:port for HTTP and WebSocket");
  app.add_option("--circuits", opt.circuits, "number of circuits S");
  app.add_option("--security", opt.label_bits, "label length K in bits");
  app.add_option("--base-ot", base_ot, "group, or dealer (insecure, tests only)")
      ->check(CLI::IsMember({"group", "dealer"}));
  app.add_option("--threads", threads, "I/O threads");
  CLI11_PARSE(app, argc, argv);
  opt.base_ot = base_ot == "dealer" ? ot::BaseOtKind::kDealer : ot::BaseOtKind::kGroup;

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop;
  sigemptyset(&stop);
  sigaddset(&stop, SIGINT);
  sigaddset(&stop, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop, nullptr);

  try {
    const auto [host, port] = transport::parse_endpoint(listen);
    friendfinder::MapService service(opt);
    friendfinder::HttpServer server(service, host, port, threads);
    std::cerr << "friend-finder listening on " << host << ":" << server.port() << std::endl;
    int sig = 0;
    sigwait(&stop, &sig);
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "friendfinder: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
