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

#include "vdq/remote_worker.h"

#include <mutex>
#include <random>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "vdq/codec.h"
#include "vdq/metadata.h"
#include "vdq/worker_ops.h"

namespace vdq {

using nlohmann::json;

namespace {

void reply_error(httplib::Response& res, int status, const std::string& msg) {
  res.status = status;
  res.set_content(json{{"error", msg}}.dump(), "application/json");
}

}  // namespace

class RemoteWorker::Impl {
 public:
  Impl(RemoteWorker& owner, const RemoteWorkerOptions& options)
      : owner_(owner), options_(options), slots_(options.slots), rng_(options.seed) {
    if (options.slots <= 0) throw Error("worker slots must be positive");
    const int threads = std::max(options.threads, 1);
    server_.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    server_.set_keep_alive_max_count(1u << 30);
    // Idle keep-alive threads only notice stop() once this expires.
    server_.set_keep_alive_timeout(1);
    server_.set_tcp_nodelay(true);
    server_.set_payload_max_length(1ull << 30);
    server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
  }

  int bind() {
    const int port = options_.port == 0 ? server_.bind_to_any_port(options_.host)
                                        : (server_.bind_to_port(options_.host, options_.port)
                                               ? options_.port
                                               : -1);
    if (port < 0) {
      throw Error("cannot bind worker to " + options_.host + ":" + std::to_string(options_.port));
    }
    return port;
  }

  void listen() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    ++owner_.requests_;
    if (!req.is_multipart_form_data() || !req.has_file("jsonArgs") ||
        !req.has_file("mediaData")) {
      return reply_error(res, 400, "expected multipart parts jsonArgs and mediaData");
    }
    std::string type;
    PropertyMap options;
    MediaDescriptor declared;
    MediaObject media;
    try {
      const auto args = json::parse(req.get_file_value("jsonArgs").content);
      type = args.at("type").get<std::string>();
      if (args.contains("options")) options = property_map_from_json(args.at("options"));
      declared = descriptor_from_json(args.at("media"));
      const auto& data = req.get_file_value("mediaData").content;
      media = decode_media(
          std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()),
          declared.kind);
    } catch (const std::exception& e) {
      return reply_error(res, 400, std::string("bad request: ") + e.what());
    }
    if (!declared.matches(media)) {
      return reply_error(res, 400, "media does not match its descriptor");
    }
    media.set_label_hint(declared.activity);
    const auto& registry = WorkerOpRegistry::instance();
    if (!registry.contains(type)) return reply_error(res, 404, "unknown operation '" + type + "'");

    MediaObject out;
    try {
      out = execute(type, media, options);
    } catch (const std::exception& e) {
      return reply_error(res, 422, e.what());
    }
    const Bytes body = encode_media(out);
    res.set_header("X-Media-Meta", to_json(MediaDescriptor::of(out)).dump());
    res.set_content(reinterpret_cast<const char*>(body.data()), body.size(),
                    "application/octet-stream");
  }

  MediaObject execute(const std::string& type, const MediaObject& media,
                      const PropertyMap& options) {
    slots_.acquire();
    struct Release {
      Impl* self;
      ~Release() {
        --self->owner_.executing_;
        self->slots_.release();
      }
    } release{this};
    const auto n = ++owner_.executing_;
    auto peak = owner_.peak_.load();
    while (n > peak && !owner_.peak_.compare_exchange_weak(peak, n)) {
    }
    if (auto delay = service_time(); delay.count() > 0) std::this_thread::sleep_for(delay);
    return WorkerOpRegistry::instance().apply(type, media, options);
  }

  std::chrono::milliseconds service_time() {
    if (options_.jitter.count() <= 0) return options_.latency;
    std::lock_guard lock(rng_mu_);
    return options_.latency +
           std::chrono::milliseconds(rng_() % (options_.jitter.count() + 1));
  }

  RemoteWorker& owner_;
  RemoteWorkerOptions options_;
  httplib::Server server_;
  std::counting_semaphore<> slots_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

RemoteWorker::RemoteWorker(RemoteWorkerOptions options)
    : impl_(std::make_unique<Impl>(*this, options)), options_(std::move(options)) {}

RemoteWorker::~RemoteWorker() { stop(); }

int RemoteWorker::start() {
  port_ = impl_->bind();
  thread_ = std::thread([this] { impl_->listen(); });
  impl_->wait_until_ready();
  spdlog::debug("worker listening on {}:{}", options_.host, port_);
  return port_;
}

void RemoteWorker::serve() {
  port_ = impl_->bind();
  spdlog::info("worker listening on {}:{} (slots {}, latency {} ms)", options_.host, port_,
               options_.slots, options_.latency.count());
  impl_->listen();
}

void RemoteWorker::stop() {
  impl_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string RemoteWorker::url(const std::string& path) const {
  return "http://" + options_.host + ":" + std::to_string(port_) + path;
}

}  // namespace vdq
