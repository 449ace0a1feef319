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

#include "vdq/server.h"

#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/asio.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "wire_io.h"

namespace vdq {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using nlohmann::json;

void ServerConfig::validate() const {
  split_host_port(bind, kDefaultServerPort);
  if (max_inflight == 0) throw Error("max_inflight must be positive");
  for (const auto& [name, urls] : pools) {
    if (urls.empty()) throw Error("pool '" + name + "' has no workers");
    for (const auto& u : urls) Url::parse(u);
  }
}

ServerConfig parse_server_config(const std::string& text) {
  ServerConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    boost::algorithm::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(fmt::format("config line {}: expected key = value", lineno));
    std::string key = boost::algorithm::trim_copy(line.substr(0, eq));
    std::string value = boost::algorithm::trim_copy(line.substr(eq + 1));
    try {
      if (key == "bind") {
        c.bind = value;
      } else if (key == "mode") {
        c.mode = execution_mode_from_string(value);
      } else if (key == "max_inflight") {
        c.max_inflight = std::stoul(value);
      } else if (key == "remote_timeout_s") {
        c.remote_timeout = std::chrono::milliseconds(static_cast<long>(std::stod(value) * 1000));
      } else if (key == "udf_host") {
        c.udf_host = value;
      } else if (key.rfind("pool.", 0) == 0 && key.size() > 5) {
        std::vector<std::string> urls;
        std::istringstream list(value);
        for (std::string u; std::getline(list, u, ',');) {
          boost::algorithm::trim(u);
          if (!u.empty()) urls.push_back(u);
        }
        c.pools[key.substr(5)] = std::move(urls);
      } else {
        throw Error("unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(fmt::format("config line {}: bad value for '{}'", lineno, key));
    } catch (const Error& e) {
      throw Error(fmt::format("config line {}: {}", lineno, e.what()));
    }
  }
  c.validate();
  return c;
}

ServerConfig load_server_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_server_config(ss.str());
}

void apply_env_overrides(ServerConfig& config) {
  if (const char* b = std::getenv("VDQ_BIND"); b && *b) config.bind = b;
  if (const char* m = std::getenv("VDQ_MODE"); m && *m) config.mode = execution_mode_from_string(m);
}

WireMessage error_reply(const std::string& message, const std::vector<std::string>& problems) {
  WireMessage r;
  r.doc = {{"status", "error"}, {"error", message}};
  if (!problems.empty()) r.doc["problems"] = problems;
  return r;
}

namespace {

RemoteClientOptions client_options(const ServerConfig& c) {
  RemoteClientOptions o;
  o.max_inflight = c.max_inflight;
  o.timeout = c.remote_timeout;
  return o;
}

UdfGatewayOptions udf_options(const ServerConfig& c) {
  UdfGatewayOptions o;
  o.host = c.udf_host;
  o.timeout = c.remote_timeout;
  return o;
}

std::shared_ptr<RemoteEndpointPool> make_pools(const ServerConfig& c) {
  auto p = std::make_shared<RemoteEndpointPool>();
  for (const auto& [name, urls] : c.pools) p->set(name, urls);
  return p;
}

struct Counter {
  explicit Counter(std::atomic<std::size_t>& c) : c_(c) { ++c_; }
  ~Counter() { --c_; }
  std::atomic<std::size_t>& c_;
};

}  // namespace

QueryEngine::QueryEngine(std::shared_ptr<MetadataStore> store, const ServerConfig& config)
    : store_(std::move(store)),
      config_(config),
      pools_(make_pools(config)),
      remote_(client_options(config), pools_),
      udf_(udf_options(config)) {}

WireMessage QueryEngine::handle(const WireMessage& request) {
  Counter active(active_queries_);
  try {
    const Query q = validate_query(request.doc);
    if (request.blobs.size() != q.blob_count) {
      return error_reply("frame carries a different number of blobs than blob_count");
    }
    ExecutionMode mode = config_.mode;
    if (request.doc.contains("mode")) {
      const auto& m = request.doc.at("mode");
      if (!m.is_string()) return error_reply("invalid query", {"mode must be \"sync\" or \"async\""});
      mode = execution_mode_from_string(m.get<std::string>());
    }
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < q.operations.size(); ++i) {
      const auto& op = q.operations[i];
      if (op.exec_class != ExecClass::kRemote || op.endpoint.rfind(kPoolScheme, 0) != 0) continue;
      const auto name = op.endpoint.substr(kPoolScheme.size());
      if (!pools_->contains(name)) {
        problems.push_back(fmt::format("operation {} (remote {}): unknown endpoint pool '{}'", i,
                                       op.type, name));
      }
    }
    if (!problems.empty()) return error_reply("invalid query", problems);
    return is_add(q.verb) ? run_add(q, request) : run_find(q, mode);
  } catch (const QueryError& e) {
    return error_reply("invalid query", e.problems());
  } catch (const std::exception& e) {
    return error_reply(e.what());
  }
}

WireMessage QueryEngine::run_add(const Query& q, const WireMessage& request) {
  const EntityId id = store_->add_entity(verb_kind(q.verb), q.properties, request.blobs.at(0));
  WireMessage r;
  r.doc = {{"status", "ok"}, {"id", id}};
  return r;
}

WireMessage QueryEngine::run_find(const Query& q, ExecutionMode mode) {
  PipelineRequest req;
  req.ids = store_->filter(verb_kind(q.verb), q.constraints);
  auto store = store_;
  req.load = [store](EntityId id) {
    auto media = store->get_media(id);
    const auto props = store->properties(id);
    if (auto it = props.find("activity"); it != props.end()) {
      if (const auto* s = std::get_if<std::string>(&it->second)) media.set_label_hint(*s);
    }
    return media;
  };
  req.ops = std::make_shared<const std::vector<OperationSpec>>(q.operations);
  req.executors = {&remote_, &udf_};
  const auto erd = run_pipeline(mode, req);

  WireMessage r;
  json entities = json::array();
  for (const auto& [id, e] : erd) {
    json item = {{"id", id}, {"status", to_string(e.status)}, {"ops_done", e.ops_done}};
    if (e.status == EntityStatus::kOk) {
      item["media"] = to_json(MediaDescriptor::of(e.media));
      if (q.return_blobs) r.blobs.push_back(encode_media(e.media));
    } else {
      item["error"] = e.error.value_or("");
    }
    entities.push_back(std::move(item));
  }
  r.doc = {{"status", "ok"}, {"matched", erd.size()}, {"entities", std::move(entities)}};
  return r;
}

class Server::Impl {
 public:
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::mutex mu;
  std::condition_variable idle;
  std::map<std::uint64_t, std::shared_ptr<tcp::socket>> sockets;
  std::uint64_t next_id = 0;
  bool stopping = false;
};

Server::Server(ServerConfig config, std::shared_ptr<MetadataStore> store)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  config_.validate();
  if (!store) store = std::make_shared<MetadataStore>();
  engine_ = std::make_unique<QueryEngine>(std::move(store), config_);
}

Server::~Server() { stop(); }

void Server::bind() {
  const auto [host, port] = split_host_port(config_.bind, kDefaultServerPort);
  tcp::endpoint ep(asio::ip::make_address(host.empty() ? "0.0.0.0" : host),
                   static_cast<unsigned short>(port));
  auto& a = impl_->acceptor;
  a.open(ep.protocol());
  a.set_option(tcp::acceptor::reuse_address(true));
  a.bind(ep);
  a.listen();
  port_ = a.local_endpoint().port();
  accept_loop();
}

void Server::accept_loop() {
  impl_->acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;
    auto sock = std::make_shared<tcp::socket>(std::move(socket));
    std::uint64_t id;
    {
      std::lock_guard lock(impl_->mu);
      if (impl_->stopping) return;
      id = impl_->next_id++;
      impl_->sockets[id] = sock;
      ++active_connections_;
      ++connections_served_;
    }
    std::thread([this, sock, id] {
      boost::system::error_code ignored;
      sock->set_option(tcp::no_delay(true), ignored);
      try {
        while (auto request = detail::read_wire(*sock)) {
          detail::write_wire(*sock, encode_wire(engine_->handle(*request)));
        }
      } catch (const WireError& e) {
        spdlog::warn("closing connection {}: {}", id, e.what());
        try {
          detail::write_wire(*sock, encode_wire(error_reply(std::string("bad frame: ") + e.what())));
        } catch (const std::exception&) {
        }
      } catch (const std::exception& e) {
        spdlog::debug("connection {} ended: {}", id, e.what());
      }
      sock->close(ignored);
      {
        std::lock_guard lock(impl_->mu);
        impl_->sockets.erase(id);
        --active_connections_;
      }
      impl_->idle.notify_all();
    }).detach();
    accept_loop();
  });
}

int Server::start() {
  bind();
  accept_thread_ = std::thread([this] { impl_->io.run(); });
  spdlog::info("vdq server listening on port {} ({} mode)", port_, to_string(config_.mode));
  return port_;
}

void Server::serve() {
  bind();
  spdlog::info("vdq server listening on port {} ({} mode)", port_, to_string(config_.mode));
  impl_->io.run();
}

void Server::stop() {
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopping) return;
    impl_->stopping = true;
    boost::system::error_code ignored;
    for (auto& [id, s] : impl_->sockets) s->shutdown(tcp::socket::shutdown_both, ignored);
  }
  asio::post(impl_->io, [this] {
    boost::system::error_code ignored;
    impl_->acceptor.close(ignored);
  });
  impl_->io.stop();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::unique_lock lock(impl_->mu);
  impl_->idle.wait(lock, [&] { return impl_->sockets.empty(); });
}

}  // namespace vdq
