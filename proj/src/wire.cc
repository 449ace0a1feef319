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

#include "vdq/wire.h"

#include <boost/asio.hpp>
#include <fmt/format.h>

#include "wire_io.h"

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

std::size_t declared_blobs(const json& doc) {
  if (!doc.is_object() || !doc.contains("blob_count")) return 0;
  const auto& n = doc.at("blob_count");
  if (!n.is_number_unsigned() && !(n.is_number_integer() && n.get<std::int64_t>() >= 0)) {
    throw WireError("blob_count must be a non-negative integer");
  }
  return n.get<std::size_t>();
}

json parse_doc(const std::uint8_t* p, std::size_t n) {
  try {
    return json::parse(p, p + n);
  } catch (const json::parse_error& e) {
    throw WireError(std::string("frame JSON does not parse: ") + e.what());
  }
}

}  // namespace

Bytes encode_wire(WireMessage msg) {
  msg.doc["blob_count"] = msg.blobs.size();
  const std::string text = msg.doc.dump();
  if (text.size() > kMaxWireJson) throw WireError("frame JSON too large");
  Bytes out;
  std::size_t total = 4 + text.size();
  for (const auto& b : msg.blobs) total += 4 + b.size();
  out.reserve(total);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& b : msg.blobs) {
    if (b.size() > kMaxWireBlob) throw WireError("blob too large");
    put_u32(out, static_cast<std::uint32_t>(b.size()));
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

WireMessage decode_wire(const Bytes& bytes) {
  std::size_t at = 0;
  auto take_u32 = [&]() {
    if (bytes.size() - at < 4) throw WireError("truncated frame");
    auto v = get_u32(bytes.data() + at);
    at += 4;
    return v;
  };
  WireMessage msg;
  const auto jlen = take_u32();
  if (jlen > kMaxWireJson || bytes.size() - at < jlen) throw WireError("truncated frame JSON");
  msg.doc = parse_doc(bytes.data() + at, jlen);
  at += jlen;
  const auto n = declared_blobs(msg.doc);
  for (std::size_t i = 0; i < n; ++i) {
    const auto blen = take_u32();
    if (bytes.size() - at < blen) throw WireError(fmt::format("truncated blob {}", i));
    msg.blobs.emplace_back(bytes.begin() + at, bytes.begin() + at + blen);
    at += blen;
  }
  if (at != bytes.size()) throw WireError("trailing bytes after frame");
  return msg;
}

namespace detail {

std::optional<WireMessage> read_wire(tcp::socket& socket) {
  std::uint8_t len[4];
  boost::system::error_code ec;
  const auto got = asio::read(socket, asio::buffer(len), ec);
  if (ec == asio::error::eof && got == 0) return std::nullopt;
  if (ec) throw boost::system::system_error(ec);
  const auto jlen = get_u32(len);
  if (jlen > kMaxWireJson) throw WireError("frame JSON too large");
  std::vector<std::uint8_t> text(jlen);
  asio::read(socket, asio::buffer(text));
  WireMessage msg;
  msg.doc = parse_doc(text.data(), text.size());
  const auto n = declared_blobs(msg.doc);
  for (std::size_t i = 0; i < n; ++i) {
    asio::read(socket, asio::buffer(len));
    const auto blen = get_u32(len);
    if (blen > kMaxWireBlob) throw WireError("blob too large");
    Bytes blob(blen);
    asio::read(socket, asio::buffer(blob));
    msg.blobs.push_back(std::move(blob));
  }
  return msg;
}

void write_wire(tcp::socket& socket, const Bytes& bytes) { asio::write(socket, asio::buffer(bytes)); }

}  // namespace detail

class QueryClient::Impl {
 public:
  Impl(const std::string& host, int port) : socket(io) {
    tcp::resolver resolver(io);
    asio::connect(socket, resolver.resolve(host, std::to_string(port)));
    socket.set_option(tcp::no_delay(true));
  }
  asio::io_context io;
  tcp::socket socket;
};

QueryClient::QueryClient(const std::string& host, int port)
    : impl_(std::make_unique<Impl>(host, port)) {}
QueryClient::~QueryClient() = default;
QueryClient::QueryClient(QueryClient&&) noexcept = default;
QueryClient& QueryClient::operator=(QueryClient&&) noexcept = default;

WireMessage QueryClient::send(const WireMessage& request) {
  send_raw(encode_wire(request));
  return receive();
}

void QueryClient::send_raw(const Bytes& bytes) { detail::write_wire(impl_->socket, bytes); }

WireMessage QueryClient::receive() {
  auto msg = detail::read_wire(impl_->socket);
  if (!msg) throw WireError("server closed the connection");
  return std::move(*msg);
}

std::pair<std::string, int> split_host_port(const std::string& s, int default_port) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) return {s, default_port};
  const std::string port = s.substr(colon + 1);
  int p = 0;
  try {
    std::size_t used = 0;
    p = std::stoi(port, &used);
    if (used != port.size()) throw std::invalid_argument(port);
  } catch (const std::exception&) {
    throw Error("bad port in '" + s + "'");
  }
  if (p < 0 || p > 65535) throw Error("port out of range in '" + s + "'");
  return {s.substr(0, colon), p};
}

}  // namespace vdq
