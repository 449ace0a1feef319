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

#include "vdq/remote_client.h"

#include <deque>
#include <optional>
#include <random>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "vdq/codec.h"

namespace vdq {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
using tcp = asio::ip::tcp;
using nlohmann::json;

Url Url::parse(const std::string& s) {
  constexpr std::string_view kScheme = "http://";
  if (s.rfind(kScheme, 0) != 0) throw Error("unsupported URL '" + s + "': expected http://");
  std::string rest = s.substr(kScheme.size());
  Url u;
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  u.target = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon == std::string::npos) {
    u.host = authority;
    u.port = "80";
  } else {
    u.host = authority.substr(0, colon);
    u.port = authority.substr(colon + 1);
  }
  if (u.host.empty() || u.port.empty()) throw Error("malformed URL '" + s + "'");
  return u;
}

void RemoteEndpointPool::set(const std::string& name, std::vector<std::string> urls) {
  if (urls.empty()) throw Error("endpoint pool '" + name + "' is empty");
  for (const auto& u : urls) Url::parse(u);
  std::lock_guard lock(mu_);
  groups_[name] = Group{std::move(urls), 0};
}

bool RemoteEndpointPool::contains(const std::string& name) const {
  std::lock_guard lock(mu_);
  return groups_.count(name) != 0;
}

std::string RemoteEndpointPool::resolve(const std::string& endpoint) {
  if (endpoint.rfind(kPoolScheme, 0) != 0) return endpoint;
  const std::string name = endpoint.substr(kPoolScheme.size());
  std::lock_guard lock(mu_);
  auto it = groups_.find(name);
  if (it == groups_.end()) throw Error("unknown endpoint pool '" + name + "'");
  auto& g = it->second;
  return g.urls[g.cursor++ % g.urls.size()];
}

std::vector<std::string> RemoteEndpointPool::names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, g] : groups_) out.push_back(name);
  return out;
}

RemoteRequestBody make_remote_body(const OperationSpec& op, const MediaObject& media) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const std::string boundary = fmt::format("vdq{:016x}{:016x}", rng(), rng());
  const json args = {{"type", op.type}, {"options", to_json(op.options)},
                     {"media", to_json(MediaDescriptor::of(media))}};
  const Bytes data = encode_media(media);

  RemoteRequestBody out;
  out.content_type = "multipart/form-data; boundary=" + boundary;
  auto& b = out.body;
  b.reserve(data.size() + 512);
  b += "--" + boundary + "\r\n";
  b += "Content-Disposition: form-data; name=\"jsonArgs\"\r\n";
  b += "Content-Type: application/json\r\n\r\n";
  b += args.dump();
  b += "\r\n--" + boundary + "\r\n";
  b += "Content-Disposition: form-data; name=\"mediaData\"; filename=\"media" +
       file_extension(media.kind()) + "\"\r\n";
  b += "Content-Type: application/octet-stream\r\n\r\n";
  b.append(reinterpret_cast<const char*>(data.data()), data.size());
  b += "\r\n--" + boundary + "--\r\n";
  return out;
}

namespace {

constexpr std::uint64_t kBodyLimit = 1ull << 30;

struct Connection {
  explicit Connection(asio::io_context& io) : stream(io) {}
  beast::tcp_stream stream;
  beast::flat_buffer buffer;
};

OpOutcome interpret(const http::response<http::string_body>& res, const std::string& label_hint,
                    const std::string& url) {
  if (res.result() != http::status::ok) {
    std::string msg = res.body();
    try {
      auto j = json::parse(res.body());
      if (j.contains("error")) msg = j.at("error").get<std::string>();
    } catch (const std::exception&) {
    }
    return OpOutcome::failure(fmt::format("{} returned HTTP {}: {}", url, res.result_int(), msg));
  }
  try {
    const auto& body = res.body();
    auto media = decode_media(
        std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
    media.set_label_hint(label_hint);
    return OpOutcome::success(std::move(media));
  } catch (const std::exception& e) {
    return OpOutcome::failure(fmt::format("{} returned an undecodable body: {}", url, e.what()));
  }
}

}  // namespace

class RemoteClient::Impl {
 public:
  struct Call {
    // Messages name the endpoint as the query wrote it, so a reply does not
    // depend on which pool member served the step.
    std::string endpoint;
    std::string url;
    Url target;
    std::shared_ptr<http::request<http::string_body>> req;
    std::string label_hint;
    Completion done;
    int attempts = 0;
    bool reused = false;
    std::unique_ptr<Connection> conn;
    std::optional<http::response_parser<http::string_body>> parser;
  };
  using CallPtr = std::shared_ptr<Call>;

  Impl(RemoteClient& owner, RemoteClientOptions options)
      : owner_(owner),
        options_(options),
        work_(asio::make_work_guard(io_)),
        resolver_(io_),
        thread_([this] { io_.run(); }) {}

  ~Impl() {
    work_.reset();
    io_.stop();
    thread_.join();
  }

  void submit(CallPtr call) {
    asio::post(io_, [this, call = std::move(call)]() mutable {
      if (owner_.active_ < options_.max_inflight) {
        start(std::move(call));
      } else {
        pending_.push_back(std::move(call));
      }
    });
  }

 private:
  void start(CallPtr call) {
    const auto n = ++owner_.active_;
    auto peak = owner_.peak_.load();
    while (n > peak && !owner_.peak_.compare_exchange_weak(peak, n)) {
    }
    auto& pool = idle_[call->target.authority()];
    if (!pool.empty()) {
      call->conn = std::move(pool.back());
      pool.pop_back();
      call->reused = true;
      send(std::move(call));
    } else {
      connect(std::move(call));
    }
  }

  void connect(CallPtr call) {
    call->reused = false;
    resolver_.async_resolve(
        call->target.host, call->target.port,
        [this, call](beast::error_code ec, tcp::resolver::results_type results) mutable {
          if (ec) return retry_or_fail(std::move(call), ec);
          call->conn = std::make_unique<Connection>(io_);
          ++owner_.opened_;
          call->conn->stream.expires_after(options_.timeout);
          call->conn->stream.async_connect(
              results, [this, call](beast::error_code ec, const tcp::endpoint&) mutable {
                if (ec) return retry_or_fail(std::move(call), ec);
                call->conn->stream.socket().set_option(tcp::no_delay(true), ec);
                send(std::move(call));
              });
        });
  }

  void send(CallPtr call) {
    call->conn->stream.expires_after(options_.timeout);
    http::async_write(call->conn->stream, *call->req,
                      [this, call](beast::error_code ec, std::size_t) mutable {
                        if (ec) return retry_or_fail(std::move(call), ec);
                        receive(std::move(call));
                      });
  }

  void receive(CallPtr call) {
    call->parser.emplace();
    call->parser->body_limit(kBodyLimit);
    http::async_read(call->conn->stream, call->conn->buffer, *call->parser,
                     [this, call](beast::error_code ec, std::size_t) mutable {
                       if (ec) return retry_or_fail(std::move(call), ec);
                       auto res = call->parser->release();
                       if (res.keep_alive()) {
                         idle_[call->target.authority()].push_back(std::move(call->conn));
                       }
                       auto outcome = interpret(res, call->label_hint, call->endpoint);
                       complete(std::move(call), std::move(outcome));
                     });
  }

  void retry_or_fail(CallPtr call, beast::error_code ec) {
    call->conn.reset();
    // A pooled connection the server already closed fails on first use;
    // that costs one fresh connection, not a retry.
    if (call->reused && ec != beast::error::timeout) {
      spdlog::debug("stale connection to {}: {}", call->url, ec.message());
      return connect(std::move(call));
    }
    if (call->attempts < options_.retries) {
      ++call->attempts;
      return connect(std::move(call));
    }
    spdlog::debug("{} via {} failed: {}", call->endpoint, call->url, ec.message());
    auto msg = fmt::format("{}: {}", call->endpoint, ec.message());
    complete(std::move(call), OpOutcome::failure(std::move(msg)));
  }

  void complete(CallPtr call, OpOutcome outcome) {
    --owner_.active_;
    while (!pending_.empty() && owner_.active_ < options_.max_inflight) {
      auto next = std::move(pending_.front());
      pending_.pop_front();
      start(std::move(next));
    }
    auto done = std::move(call->done);
    call.reset();
    done(std::move(outcome));
  }

  RemoteClient& owner_;
  RemoteClientOptions options_;
  asio::io_context io_;
  asio::executor_work_guard<asio::io_context::executor_type> work_;
  tcp::resolver resolver_;
  std::map<std::string, std::vector<std::unique_ptr<Connection>>> idle_;
  std::deque<CallPtr> pending_;
  std::thread thread_;
};

RemoteClient::RemoteClient(RemoteClientOptions options, std::shared_ptr<RemoteEndpointPool> pools)
    : pools_(std::move(pools)) {
  if (options.max_inflight == 0) throw Error("max_inflight must be positive");
  impl_ = std::make_unique<Impl>(*this, options);
}

RemoteClient::~RemoteClient() = default;

void RemoteClient::dispatch(EntityId, const OperationSpec& op, const MediaObject& media,
                            Completion done) {
  auto call = std::make_shared<Impl::Call>();
  call->endpoint = op.endpoint;
  call->url = pools_ ? pools_->resolve(op.endpoint) : op.endpoint;
  call->target = Url::parse(call->url);
  auto body = make_remote_body(op, media);
  auto req = std::make_shared<http::request<http::string_body>>(http::verb::post,
                                                                call->target.target, 11);
  req->set(http::field::host, call->target.host);
  req->set(http::field::content_type, body.content_type);
  req->keep_alive(true);
  req->body() = std::move(body.body);
  req->prepare_payload();
  call->req = std::move(req);
  call->label_hint = media.label_hint();
  call->done = std::move(done);
  impl_->submit(std::move(call));
}

}  // namespace vdq
