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

#include "vdq/media.h"

#include <string>

namespace vdq {

PixelImage::PixelImage(int width, int height, int channels)
    : PixelImage(width, height, channels,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                           (height > 0 ? height : 0) *
                                           (channels > 0 ? channels : 0))) {}

PixelImage::PixelImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  const auto expected = static_cast<std::size_t>(width) * height * channels;
  if (data_.size() != expected) {
    throw Error("pixel buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                std::to_string(expected));
  }
}

std::string to_string(MediaKind kind) { return kind == MediaKind::kImage ? "image" : "video"; }

MediaKind media_kind_from_string(const std::string& s) {
  if (s == "image") return MediaKind::kImage;
  if (s == "video") return MediaKind::kVideo;
  throw Error("unknown media kind '" + s + "'");
}

MediaObject::MediaObject(MediaKind kind, std::vector<PixelImage> frames, FrameRate fps)
    : kind_(kind), frames_(std::move(frames)), fps_(fps) {
  if (frames_.empty()) throw Error("media must contain at least one frame");
  if (kind_ == MediaKind::kImage && frames_.size() != 1) {
    throw Error("an image holds exactly one frame");
  }
  if (fps_.num == 0 || fps_.den == 0) throw Error("frame rate must be positive");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(frames_[0])) {
      throw Error("frame " + std::to_string(i) + " shape differs from frame 0");
    }
  }
}

MediaObject MediaObject::image(PixelImage frame) {
  std::vector<PixelImage> frames;
  frames.push_back(std::move(frame));
  return MediaObject(MediaKind::kImage, std::move(frames), FrameRate{});
}

MediaObject MediaObject::video(std::vector<PixelImage> frames, FrameRate fps) {
  return MediaObject(MediaKind::kVideo, std::move(frames), fps);
}

}  // namespace vdq
