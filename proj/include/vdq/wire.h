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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdq/codec.h"

namespace vdq {

// Client/server framing:
//   u32 big-endian JSON length | JSON document | blob_count x (u32 big-endian length | bytes)
// blob_count is read from the document's "blob_count" field (absent means 0).
struct WireMessage {
  nlohmann::json doc = nlohmann::json::object();
  std::vector<Bytes> blobs;
};

class WireError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kMaxWireJson = 64u << 20;
inline constexpr std::uint32_t kMaxWireBlob = 1u << 30;

// Sets doc["blob_count"] to blobs.size() before encoding.
Bytes encode_wire(WireMessage msg);
WireMessage decode_wire(const Bytes& bytes);

// Blocking connection to a query server.
class QueryClient {
 public:
  QueryClient(const std::string& host, int port);
  ~QueryClient();
  QueryClient(QueryClient&&) noexcept;
  QueryClient& operator=(QueryClient&&) noexcept;

  WireMessage send(const WireMessage& request);
  void send_raw(const Bytes& bytes);
  WireMessage receive();

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port" with host optional (":55555" binds all interfaces).
std::pair<std::string, int> split_host_port(const std::string& s, int default_port);

}  // namespace vdq
