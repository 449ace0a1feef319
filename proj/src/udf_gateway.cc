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

#include "vdq/udf_gateway.h"

#include <array>
#include <deque>
#include <map>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

namespace vdq {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

}  // namespace

Bytes encode_udf_frame(const UdfFrame& f) {
  json h = {{"direction", f.direction == UdfFrame::Direction::kRequest ? "request" : "response"},
            {"entity_id", f.entity_id},
            {"nonce", f.nonce},
            {"op_type", f.op_type},
            {"options", to_json(f.options)},
            {"media", f.media ? to_json(*f.media) : json(nullptr)},
            {"error", f.error ? json(*f.error) : json(nullptr)}};
  const std::string header = h.dump();
  if (header.size() > kMaxUdfHeader) throw CodecError("UDF header too large");
  if (f.payload.size() > kMaxUdfPayload) throw CodecError("UDF payload too large");
  Bytes out;
  out.reserve(8 + header.size() + f.payload.size());
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  put_u32(out, static_cast<std::uint32_t>(f.payload.size()));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

UdfFrame decode_udf_header(std::span<const std::uint8_t> header_json) {
  UdfFrame f;
  try {
    const auto h = json::parse(header_json.begin(), header_json.end());
    const auto dir = h.at("direction").get<std::string>();
    if (dir == "request") {
      f.direction = UdfFrame::Direction::kRequest;
    } else if (dir == "response") {
      f.direction = UdfFrame::Direction::kResponse;
    } else {
      throw CodecError("bad direction '" + dir + "'");
    }
    f.entity_id = h.at("entity_id").get<EntityId>();
    f.nonce = h.at("nonce").get<std::uint64_t>();
    f.op_type = h.value("op_type", "");
    if (h.contains("options") && !h.at("options").is_null()) {
      f.options = property_map_from_json(h.at("options"));
    }
    if (h.contains("media") && !h.at("media").is_null()) {
      f.media = descriptor_from_json(h.at("media"));
    }
    if (h.contains("error") && !h.at("error").is_null()) f.error = h.at("error").get<std::string>();
  } catch (const CodecError&) {
    throw;
  } catch (const std::exception& e) {
    throw CodecError(std::string("malformed UDF header: ") + e.what());
  }
  return f;
}

UdfFrame decode_udf_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw CodecError("truncated UDF frame");
  const std::uint32_t hlen = get_u32(bytes.data());
  if (hlen > kMaxUdfHeader || bytes.size() < 8 + std::size_t{hlen}) {
    throw CodecError("truncated UDF frame header");
  }
  UdfFrame f = decode_udf_header(bytes.subspan(4, hlen));
  const std::uint32_t plen = get_u32(bytes.data() + 4 + hlen);
  if (bytes.size() != 8 + std::size_t{hlen} + plen) {
    throw CodecError(fmt::format("UDF frame length mismatch: {} bytes for payload of {}",
                                 bytes.size() - 8 - hlen, plen));
  }
  const auto* p = bytes.data() + 8 + hlen;
  f.payload.assign(p, p + plen);
  return f;
}

class UdfGateway::Impl {
 public:
  Impl(UdfGateway& owner, UdfGatewayOptions options)
      : owner_(owner),
        options_(std::move(options)),
        work_(asio::make_work_guard(io_)),
        resolver_(io_),
        thread_([this] { io_.run(); }) {}

  ~Impl() {
    work_.reset();
    io_.stop();
    thread_.join();
  }

  void submit(int port, std::uint64_t nonce, std::shared_ptr<Bytes> frame, std::string label_hint,
              Completion done) {
    asio::post(io_, [this, port, nonce, frame = std::move(frame),
                     label_hint = std::move(label_hint), done = std::move(done)]() mutable {
      auto timer = std::make_unique<asio::steady_timer>(io_, options_.timeout);
      timer->async_wait([this, nonce, port](boost::system::error_code ec) {
        if (!ec) complete(nonce, OpOutcome::failure(fmt::format("UDF on port {} timed out", port)));
      });
      pending_.emplace(nonce, Pending{std::move(done), std::move(label_hint), std::move(timer)});
      auto ch = channel(port);
      ch->nonces.insert(nonce);
      ch->writes.push_back(std::move(frame));
      pump_writes(ch);
    });
  }

 private:
  struct Pending {
    Completion done;
    std::string label_hint;
    std::unique_ptr<asio::steady_timer> timer;
  };

  struct Channel {
    explicit Channel(asio::io_context& io, int p) : port(p), socket(io) {}
    int port;
    tcp::socket socket;
    bool connected = false;
    bool broken = false;
    bool writing = false;
    std::deque<std::shared_ptr<Bytes>> writes;
    std::set<std::uint64_t> nonces;
    std::array<std::uint8_t, 4> len{};
    std::vector<std::uint8_t> header;
    Bytes payload;
  };
  using ChannelPtr = std::shared_ptr<Channel>;

  ChannelPtr channel(int port) {
    auto it = channels_.find(port);
    if (it != channels_.end()) return it->second;
    auto ch = std::make_shared<Channel>(io_, port);
    channels_[port] = ch;
    ++owner_.opened_;
    resolver_.async_resolve(
        options_.host, std::to_string(port),
        [this, ch](boost::system::error_code ec, tcp::resolver::results_type results) {
          if (ec) return fail_channel(ch, ec.message());
          asio::async_connect(ch->socket, results,
                              [this, ch](boost::system::error_code ec, const tcp::endpoint&) {
                                if (ec) return fail_channel(ch, ec.message());
                                if (ch->broken) return;
                                ch->connected = true;
                                ch->socket.set_option(tcp::no_delay(true), ec);
                                read_length(ch);
                                pump_writes(ch);
                              });
        });
    return ch;
  }

  void pump_writes(const ChannelPtr& ch) {
    if (!ch->connected || ch->broken || ch->writing || ch->writes.empty()) return;
    ch->writing = true;
    auto buf = ch->writes.front();
    asio::async_write(ch->socket, asio::buffer(*buf),
                      [this, ch, buf](boost::system::error_code ec, std::size_t) {
                        ch->writing = false;
                        if (ec) return fail_channel(ch, ec.message());
                        ch->writes.pop_front();
                        pump_writes(ch);
                      });
  }

  void read_length(const ChannelPtr& ch) {
    asio::async_read(ch->socket, asio::buffer(ch->len),
                     [this, ch](boost::system::error_code ec, std::size_t) {
                       if (ec) return fail_channel(ch, ec.message());
                       const auto n = get_u32(ch->len.data());
                       if (n > kMaxUdfHeader) return fail_channel(ch, "oversized frame header");
                       ch->header.resize(n);
                       read_header(ch);
                     });
  }

  void read_header(const ChannelPtr& ch) {
    asio::async_read(ch->socket, asio::buffer(ch->header),
                     [this, ch](boost::system::error_code ec, std::size_t) {
                       if (ec) return fail_channel(ch, ec.message());
                       asio::async_read(
                           ch->socket, asio::buffer(ch->len),
                           [this, ch](boost::system::error_code ec, std::size_t) {
                             if (ec) return fail_channel(ch, ec.message());
                             const auto n = get_u32(ch->len.data());
                             if (n > kMaxUdfPayload) return fail_channel(ch, "oversized payload");
                             ch->payload.resize(n);
                             read_payload(ch);
                           });
                     });
  }

  void read_payload(const ChannelPtr& ch) {
    asio::async_read(ch->socket, asio::buffer(ch->payload),
                     [this, ch](boost::system::error_code ec, std::size_t) {
                       if (ec) return fail_channel(ch, ec.message());
                       UdfFrame frame;
                       try {
                         frame = decode_udf_header(ch->header);
                       } catch (const std::exception& e) {
                         return fail_channel(ch, e.what());
                       }
                       frame.payload = std::move(ch->payload);
                       ch->nonces.erase(frame.nonce);
                       on_frame(std::move(frame));
                       read_length(ch);
                     });
  }

  void on_frame(UdfFrame frame) {
    auto it = pending_.find(frame.nonce);
    if (it == pending_.end()) {
      spdlog::warn("dropping UDF reply with unknown nonce {}", frame.nonce);
      return;
    }
    if (frame.error) return complete(frame.nonce, OpOutcome::failure(*frame.error));
    try {
      auto media = decode_media(frame.payload);
      if (frame.media && !frame.media->matches(media)) {
        throw CodecError("reply media does not match its descriptor");
      }
      media.set_label_hint(it->second.label_hint);
      complete(frame.nonce, OpOutcome::success(std::move(media)));
    } catch (const std::exception& e) {
      complete(frame.nonce, OpOutcome::failure(std::string("bad UDF reply: ") + e.what()));
    }
  }

  void fail_channel(const ChannelPtr& ch, const std::string& reason) {
    if (ch->broken) return;
    ch->broken = true;
    boost::system::error_code ignored;
    ch->socket.close(ignored);
    auto it = channels_.find(ch->port);
    if (it != channels_.end() && it->second == ch) channels_.erase(it);
    const auto nonces = std::move(ch->nonces);
    ch->nonces.clear();
    ch->writes.clear();
    spdlog::debug("UDF channel to port {} failed: {}", ch->port, reason);
    for (auto nonce : nonces) {
      complete(nonce,
               OpOutcome::failure(fmt::format("UDF channel to port {} failed: {}", ch->port, reason)));
    }
  }

  void complete(std::uint64_t nonce, OpOutcome outcome) {
    auto it = pending_.find(nonce);
    if (it == pending_.end()) return;
    Pending p = std::move(it->second);
    pending_.erase(it);
    p.timer->cancel();
    p.done(std::move(outcome));
  }

  UdfGateway& owner_;
  UdfGatewayOptions options_;
  asio::io_context io_;
  asio::executor_work_guard<asio::io_context::executor_type> work_;
  tcp::resolver resolver_;
  std::map<int, ChannelPtr> channels_;
  std::map<std::uint64_t, Pending> pending_;
  std::thread thread_;
};

UdfGateway::UdfGateway(UdfGatewayOptions options)
    : impl_(std::make_unique<Impl>(*this, std::move(options))) {}

UdfGateway::~UdfGateway() = default;

void UdfGateway::dispatch(EntityId id, const OperationSpec& op, const MediaObject& media,
                          Completion done) {
  if (op.channel_port <= 0 || op.channel_port > 65535) {
    return done(OpOutcome::failure(fmt::format("invalid UDF port {}", op.channel_port)));
  }
  UdfFrame f;
  f.direction = UdfFrame::Direction::kRequest;
  f.entity_id = id;
  f.nonce = next_nonce_++;
  f.op_type = op.type;
  f.options = op.options;
  f.media = MediaDescriptor::of(media);
  f.payload = encode_media(media);
  auto frame = std::make_shared<Bytes>(encode_udf_frame(f));
  impl_->submit(op.channel_port, f.nonce, std::move(frame), media.label_hint(), std::move(done));
}

}  // namespace vdq
