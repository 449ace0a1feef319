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

#include "vdq/codec.h"

#include <png.h>

#include <algorithm>
#include <cstring>

namespace vdq {

namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
constexpr std::uint8_t kRvidMagic[4] = {'R', 'V', 'I', 'D'};
constexpr std::size_t kRvidHeader = 4 + 6 * 4;

void put_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

bool has_prefix(std::span<const std::uint8_t> b, std::span<const std::uint8_t> magic) {
  return b.size() >= magic.size() && std::equal(magic.begin(), magic.end(), b.begin());
}

struct PngImage {
  png_image image{};
  PngImage() { image.version = PNG_IMAGE_VERSION; }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

Bytes encode_png(const PixelImage& img) {
  if (img.empty()) throw CodecError("cannot encode an empty image");
  PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width());
  png.image.height = static_cast<png_uint_32>(img.height());
  png.image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png.image.flags = PNG_IMAGE_FLAG_FAST;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
    throw CodecError(std::string("png encode failed: ") + png.image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, img.data().data(), 0,
                                 nullptr)) {
    throw CodecError(std::string("png encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

PixelImage decode_png(std::span<const std::uint8_t> bytes) {
  if (!has_prefix(bytes, kPngMagic)) throw CodecError("not a PNG stream");
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw CodecError(std::string("png decode failed: ") + png.image.message);
  }
  const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  const int width = static_cast<int>(png.image.width);
  const int height = static_cast<int>(png.image.height);
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, data.data(), 0, nullptr)) {
    throw CodecError(std::string("png decode failed: ") + png.image.message);
  }
  return PixelImage(width, height, channels, std::move(data));
}

Bytes encode_rvid(const MediaObject& video) {
  if (video.frame_count() == 0) throw CodecError("cannot encode an empty video");
  const auto frame_bytes = video.frame(0).data().size();
  Bytes out;
  out.reserve(kRvidHeader + frame_bytes * video.frame_count());
  for (auto b : kRvidMagic) out.push_back(b);
  put_u32(out, static_cast<std::uint32_t>(video.width()));
  put_u32(out, static_cast<std::uint32_t>(video.height()));
  put_u32(out, static_cast<std::uint32_t>(video.channels()));
  put_u32(out, static_cast<std::uint32_t>(video.frame_count()));
  put_u32(out, video.fps().num);
  put_u32(out, video.fps().den);
  for (const auto& f : video.frames()) out.insert(out.end(), f.data().begin(), f.data().end());
  return out;
}

MediaObject decode_rvid(std::span<const std::uint8_t> bytes) {
  if (!has_prefix(bytes, kRvidMagic)) throw CodecError("not an RVID stream");
  if (bytes.size() < kRvidHeader) throw CodecError("truncated RVID header");
  const auto width = get_u32(bytes, 4);
  const auto height = get_u32(bytes, 8);
  const auto channels = get_u32(bytes, 12);
  const auto count = get_u32(bytes, 16);
  const FrameRate fps{get_u32(bytes, 20), get_u32(bytes, 24)};
  if (width == 0 || height == 0 || (channels != 1 && channels != 3) || count == 0 ||
      width > (1u << 16) || height > (1u << 16)) {
    throw CodecError("invalid RVID header");
  }
  const std::size_t frame_bytes = std::size_t{width} * height * channels;
  if (bytes.size() != kRvidHeader + frame_bytes * count) {
    throw CodecError("RVID payload is " + std::to_string(bytes.size() - kRvidHeader) +
                     " bytes, expected " + std::to_string(frame_bytes * count));
  }
  std::vector<PixelImage> frames;
  frames.reserve(count);
  auto cursor = bytes.begin() + kRvidHeader;
  for (std::uint32_t i = 0; i < count; ++i) {
    frames.emplace_back(static_cast<int>(width), static_cast<int>(height),
                        static_cast<int>(channels),
                        std::vector<std::uint8_t>(cursor, cursor + frame_bytes));
    cursor += frame_bytes;
  }
  try {
    return MediaObject::video(std::move(frames), fps);
  } catch (const Error& e) {
    throw CodecError(std::string("invalid RVID: ") + e.what());
  }
}

Bytes encode_media(const MediaObject& media) {
  return media.is_image() ? encode_png(media.frame(0)) : encode_rvid(media);
}

MediaObject decode_media(std::span<const std::uint8_t> bytes) {
  if (has_prefix(bytes, kPngMagic)) return MediaObject::image(decode_png(bytes));
  if (has_prefix(bytes, kRvidMagic)) return decode_rvid(bytes);
  throw CodecError("unrecognised media container");
}

MediaObject decode_media(std::span<const std::uint8_t> bytes, MediaKind expected) {
  auto media = decode_media(bytes);
  if (media.kind() != expected) {
    throw CodecError("expected " + to_string(expected) + " data, got " + to_string(media.kind()));
  }
  return media;
}

MediaDescriptor MediaDescriptor::of(const MediaObject& media) {
  return {media.kind(),        media.width(),       media.height(), media.channels(),
          media.frame_count(), media.fps().value(), media.label_hint()};
}

bool MediaDescriptor::matches(const MediaObject& media) const {
  return kind == media.kind() && width == media.width() && height == media.height() &&
         channels == media.channels() && frame_count == media.frame_count();
}

nlohmann::json to_json(const MediaDescriptor& d) {
  nlohmann::json j{{"kind", to_string(d.kind)},   {"width", d.width},
                   {"height", d.height},          {"channels", d.channels},
                   {"frame_count", d.frame_count}, {"fps", d.fps}};
  if (!d.activity.empty()) j["activity"] = d.activity;
  return j;
}

MediaDescriptor descriptor_from_json(const nlohmann::json& j) {
  try {
    MediaDescriptor d;
    d.kind = media_kind_from_string(j.at("kind").get<std::string>());
    d.width = j.at("width").get<int>();
    d.height = j.at("height").get<int>();
    d.channels = j.at("channels").get<int>();
    d.frame_count = j.at("frame_count").get<std::size_t>();
    d.fps = j.value("fps", 0.0);
    d.activity = j.value("activity", std::string());
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw CodecError(std::string("bad media descriptor: ") + e.what());
  }
}

std::string file_extension(MediaKind kind) { return kind == MediaKind::kImage ? ".png" : ".rvid"; }

}  // namespace vdq
