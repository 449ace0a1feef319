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
#include <optional>
#include <span>
#include <string>

#include "vdq/codec.h"
#include "vdq/pipeline.h"

namespace vdq {

// One message on a UDF channel:
//   u32 big-endian header length | header JSON (UTF-8)
//   u32 big-endian payload length | payload (encoded media, may be empty)
struct UdfFrame {
  enum class Direction { kRequest, kResponse };

  Direction direction = Direction::kRequest;
  EntityId entity_id = 0;
  std::uint64_t nonce = 0;
  std::string op_type;
  PropertyMap options;
  std::optional<MediaDescriptor> media;
  std::optional<std::string> error;
  Bytes payload;

  bool operator==(const UdfFrame&) const = default;
};

Bytes encode_udf_frame(const UdfFrame& frame);
// Parses one complete frame. Throws CodecError on malformed or trailing bytes.
UdfFrame decode_udf_frame(std::span<const std::uint8_t> bytes);
// Header half of a frame, for readers that consume the stream in pieces.
UdfFrame decode_udf_header(std::span<const std::uint8_t> header_json);

inline constexpr std::uint32_t kMaxUdfHeader = 1u << 20;
inline constexpr std::uint32_t kMaxUdfPayload = 1u << 30;

struct UdfGatewayOptions {
  std::string host = "127.0.0.1";
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
};

// Executor for user-defined steps. Keeps one persistent connection per port,
// multiplexes requests on it, and matches replies by nonce. A broken channel
// fails its outstanding requests; the next dispatch reconnects.
class UdfGateway : public DeferredExecutor {
 public:
  explicit UdfGateway(UdfGatewayOptions options = {});
  ~UdfGateway() override;
  UdfGateway(const UdfGateway&) = delete;
  UdfGateway& operator=(const UdfGateway&) = delete;

  void dispatch(EntityId id, const OperationSpec& op, const MediaObject& media,
                Completion done) override;

  std::size_t channels_opened() const { return opened_.load(); }

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<std::uint64_t> next_nonce_{1};
  std::atomic<std::size_t> opened_{0};
};

}  // namespace vdq
