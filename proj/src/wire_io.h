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

#include <optional>

#include <boost/asio/ip/tcp.hpp>

#include "vdq/wire.h"

namespace vdq::detail {

// Returns nullopt on a clean close before the first byte of a frame.
std::optional<WireMessage> read_wire(boost::asio::ip::tcp::socket& socket);
void write_wire(boost::asio::ip::tcp::socket& socket, const Bytes& bytes);

}  // namespace vdq::detail
