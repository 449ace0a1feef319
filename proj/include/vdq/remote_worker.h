// Copyright 2026 The vdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

namespace vdq {

struct RemoteWorkerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  // Simulated service time added to every execution, plus uniform jitter.
  std::chrono::milliseconds latency{0};
  std::chrono::milliseconds jitter{0};
  // Executions allowed to run at once; further requests queue.
  int slots = 64;
  // HTTP handler threads. Each open keep-alive connection holds one.
  int threads = 256;
  std::uint64_t seed = 1;
};

// HTTP service that runs worker operations on posted media.
//   POST <any path>  multipart jsonArgs + mediaData  -> 200 media body
//   GET  /healthz                                    -> "ok"
// Errors: 400 malformed request, 404 unknown operation, 422 operation failed.
class RemoteWorker {
 public:
  explicit RemoteWorker(RemoteWorkerOptions options = {});
  ~RemoteWorker();
  RemoteWorker(const RemoteWorker&) = delete;
  RemoteWorker& operator=(const RemoteWorker&) = delete;

  // Binds and starts serving in the background. Returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void serve();
  void stop();

  int port() const { return port_; }
  std::string url(const std::string& path = "/") const;

  std::size_t requests() const { return requests_.load(); }
  std::size_t peak_executing() const { return peak_.load(); }

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
  RemoteWorkerOptions options_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> executing_{0};
  std::atomic<std::size_t> peak_{0};
};

}  // namespace vdq
