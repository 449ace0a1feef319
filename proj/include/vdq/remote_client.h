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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "vdq/pipeline.h"

namespace vdq {

struct Url {
  std::string host;
  std::string port;
  std::string target;

  // Accepts http://host[:port][/path]; port defaults to 80, path to "/".
  static Url parse(const std::string& s);
  std::string authority() const { return host + ":" + port; }
};

// Named groups of worker URLs. An endpoint written as "pool://name" resolves
// to the group's next URL in round-robin order, once per dispatch.
class RemoteEndpointPool {
 public:
  void set(const std::string& name, std::vector<std::string> urls);
  bool contains(const std::string& name) const;
  std::string resolve(const std::string& endpoint);
  std::vector<std::string> names() const;

 private:
  struct Group {
    std::vector<std::string> urls;
    std::size_t cursor = 0;
  };
  mutable std::mutex mu_;
  std::map<std::string, Group> groups_;
};

inline constexpr std::string_view kPoolScheme = "pool://";

struct RemoteClientOptions {
  std::size_t max_inflight = 64;
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
  // Extra attempts after a transport failure. HTTP error replies are final.
  int retries = 0;
};

// Multipart body for one remote step: a "jsonArgs" part with the operation
// and media descriptor and a "mediaData" part with the encoded media.
struct RemoteRequestBody {
  std::string content_type;
  std::string body;
};
RemoteRequestBody make_remote_body(const OperationSpec& op, const MediaObject& media);

// Asynchronous HTTP executor for remote steps. One I/O thread services every
// request; requests beyond max_inflight wait in a FIFO.
class RemoteClient : public DeferredExecutor {
 public:
  explicit RemoteClient(RemoteClientOptions options = {},
                        std::shared_ptr<RemoteEndpointPool> pools = nullptr);
  ~RemoteClient() override;
  RemoteClient(const RemoteClient&) = delete;
  RemoteClient& operator=(const RemoteClient&) = delete;

  void dispatch(EntityId id, const OperationSpec& op, const MediaObject& media,
                Completion done) override;

  std::size_t inflight() const { return active_.load(); }
  std::size_t peak_inflight() const { return peak_.load(); }
  std::size_t connections_opened() const { return opened_.load(); }

 private:
  class Impl;
  friend class Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<RemoteEndpointPool> pools_;
  std::atomic<std::size_t> active_{0};
  std::atomic<std::size_t> peak_{0};
  std::atomic<std::size_t> opened_{0};
};

}  // namespace vdq
