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
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "vdq/metadata_store.h"
#include "vdq/pipeline.h"
#include "vdq/remote_client.h"
#include "vdq/udf_gateway.h"
#include "vdq/wire.h"

namespace vdq {

inline constexpr int kDefaultServerPort = 55555;

struct ServerConfig {
  std::string bind = "0.0.0.0:55555";
  ExecutionMode mode = ExecutionMode::kAsync;
  std::map<std::string, std::vector<std::string>> pools;
  std::size_t max_inflight = 64;
  std::chrono::milliseconds remote_timeout{std::chrono::seconds(300)};
  std::string udf_host = "127.0.0.1";

  void validate() const;
};

// Reads "key = value" lines; '#' starts a comment. Keys: bind, mode,
// max_inflight, remote_timeout_s, udf_host, pool.<name> = url[,url...].
ServerConfig parse_server_config(const std::string& text);
ServerConfig load_server_config(const std::string& path);
// VDQ_BIND and VDQ_MODE replace the corresponding fields when set.
void apply_env_overrides(ServerConfig& config);

// Executes one request document against the store. Thread-safe; one engine
// serves every connection.
class QueryEngine {
 public:
  QueryEngine(std::shared_ptr<MetadataStore> store, const ServerConfig& config);

  // A request may set "mode" to "sync" or "async" to override the default.
  WireMessage handle(const WireMessage& request);

  MetadataStore& store() { return *store_; }
  std::size_t active_queries() const { return active_queries_.load(); }

 private:
  WireMessage run_add(const Query& q, const WireMessage& request);
  WireMessage run_find(const Query& q, ExecutionMode mode);

  std::shared_ptr<MetadataStore> store_;
  ServerConfig config_;
  std::shared_ptr<RemoteEndpointPool> pools_;
  RemoteClient remote_;
  UdfGateway udf_;
  std::atomic<std::size_t> active_queries_{0};
};

WireMessage error_reply(const std::string& message, const std::vector<std::string>& problems = {});

class Server {
 public:
  explicit Server(ServerConfig config, std::shared_ptr<MetadataStore> store = nullptr);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and accepts in the background; returns the bound port.
  int start();
  // Binds and accepts on the calling thread until stop().
  void serve();
  void stop();

  int port() const { return port_; }
  QueryEngine& engine() { return *engine_; }
  std::size_t active_connections() const { return active_connections_.load(); }
  std::size_t active_queries() const { return engine_->active_queries(); }
  std::size_t connections_served() const { return connections_served_.load(); }

 private:
  class Impl;
  void bind();
  void accept_loop();

  ServerConfig config_;
  std::unique_ptr<QueryEngine> engine_;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread accept_thread_;
  std::atomic<std::size_t> active_connections_{0};
  std::atomic<std::size_t> connections_served_{0};
};

}  // namespace vdq
