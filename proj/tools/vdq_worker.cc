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

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "signal_wait.h"
#include "vdq/remote_worker.h"
#include "vdq/wire.h"

int main(int argc, char** argv) {
  CLI::App app{"vdq remote worker"};
  std::string bind = "0.0.0.0:9000", log_level = "info";
  int latency_ms = 0, jitter_ms = 0, slots = 64, threads = 256;
  std::uint64_t seed = 1;
  app.add_option("--bind", bind, "host:port to listen on")->capture_default_str();
  app.add_option("--latency-ms", latency_ms, "added service time per request")->check(CLI::NonNegativeNumber);
  app.add_option("--jitter-ms", jitter_ms, "uniform extra delay, 0..N ms")->check(CLI::NonNegativeNumber);
  app.add_option("--slots", slots, "operations executing at once")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--threads", threads, "HTTP handler threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", seed, "jitter seed");
  app.add_option("--log-level", log_level)->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    vdq::RemoteWorkerOptions o;
    std::tie(o.host, o.port) = vdq::split_host_port(bind, 9000);
    if (o.host.empty()) o.host = "0.0.0.0";
    o.latency = std::chrono::milliseconds(latency_ms);
    o.jitter = std::chrono::milliseconds(jitter_ms);
    o.slots = slots;
    o.threads = threads;
    o.seed = seed;

    vdq::tools::block_termination_signals();
    vdq::RemoteWorker worker(o);
    const int port = worker.start();
    spdlog::info("worker listening on {}:{} (latency {} ms, jitter {} ms, {} slots)", o.host, port,
                 latency_ms, jitter_ms, slots);
    vdq::tools::wait_for_termination();
    worker.stop();
    spdlog::info("served {} requests", worker.requests());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
