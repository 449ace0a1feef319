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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdq/media.h"

namespace vdq {

class CodecError : public Error {
 public:
  using Error::Error;
};

using Bytes = std::vector<std::uint8_t>;

// Lossless PNG; 1-channel images become 8-bit gray, 3-channel 8-bit RGB.
Bytes encode_png(const PixelImage& img);
// Any PNG is accepted; colour inputs decode to 3 channels, gray to 1, and
// alpha is dropped.
PixelImage decode_png(std::span<const std::uint8_t> bytes);

// Raw video container:
//   "RVID" | u32be width | height | channels | frame_count | fps_num | fps_den
//   | frame_count * (width*height*channels) bytes, row-major interleaved.
Bytes encode_rvid(const MediaObject& video);
MediaObject decode_rvid(std::span<const std::uint8_t> bytes);

// Images as PNG, videos as RVID.
Bytes encode_media(const MediaObject& media);
// Sniffs the container from its magic bytes.
MediaObject decode_media(std::span<const std::uint8_t> bytes);
// Like decode_media, but the container must match `expected`.
MediaObject decode_media(std::span<const std::uint8_t> bytes, MediaKind expected);

// {"kind","width","height","channels","frame_count","fps"} plus an optional
// "activity" label hint. Travels beside encoded media on the wire.
struct MediaDescriptor {
  MediaKind kind = MediaKind::kImage;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::size_t frame_count = 0;
  double fps = 0;
  std::string activity;

  static MediaDescriptor of(const MediaObject& media);
  bool matches(const MediaObject& media) const;
  bool operator==(const MediaDescriptor&) const = default;
};

nlohmann::json to_json(const MediaDescriptor& d);
MediaDescriptor descriptor_from_json(const nlohmann::json& j);

std::string file_extension(MediaKind kind);

}  // namespace vdq
