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

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "signal_wait.h"
#include "vdq/server.h"

int main(int argc, char** argv) {
  CLI::App app{"vdq query server"};
  std::string config_path, bind, mode, udf_host, log_level = "info";
  std::size_t max_inflight = 0;
  double remote_timeout_s = 0;
  std::vector<std::string> pools;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--bind", bind, "host:port to listen on (default 0.0.0.0:55555)");
  app.add_option("--mode", mode, "default execution mode")->check(CLI::IsMember({"sync", "async"}));
  app.add_option("--max-inflight", max_inflight, "remote requests in flight per server");
  app.add_option("--remote-timeout-s", remote_timeout_s, "per-request remote timeout");
  app.add_option("--udf-host", udf_host, "host running UDF processes");
  app.add_option("--pool", pools, "worker pool as NAME=url[,url...]; repeatable");
  app.add_option("--log-level", log_level)->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    // Precedence: file, then environment, then flags.
    vdq::ServerConfig config = config_path.empty() ? vdq::ServerConfig{} : vdq::load_server_config(config_path);
    vdq::apply_env_overrides(config);
    if (!bind.empty()) config.bind = bind;
    if (!mode.empty()) config.mode = vdq::execution_mode_from_string(mode);
    if (max_inflight) config.max_inflight = max_inflight;
    if (remote_timeout_s > 0) config.remote_timeout = std::chrono::milliseconds(static_cast<long>(remote_timeout_s * 1000));
    if (!udf_host.empty()) config.udf_host = udf_host;
    for (const auto& p : pools) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw vdq::Error("--pool expects NAME=url[,url...], got '" + p + "'");
      config.pools[p.substr(0, eq)] = vdq::parse_server_config("pool.x = " + p.substr(eq + 1)).pools.at("x");
    }
    config.validate();

    vdq::tools::block_termination_signals();
    vdq::Server server(config);
    server.start();
    for (const auto& [name, urls] : config.pools) spdlog::info("pool {}: {} worker(s)", name, urls.size());
    const int sig = vdq::tools::wait_for_termination();
    spdlog::info("signal {}, shutting down", sig);
    server.stop();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
