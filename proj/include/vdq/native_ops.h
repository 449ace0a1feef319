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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vdq/media.h"
#include "vdq/metadata.h"
#include "vdq/query.h"

namespace vdq {

enum class FlipAxis { kHorizontal, kVertical };

// round(0.299 R + 0.587 G + 0.114 B), evaluated in exact integer arithmetic
// with halves rounded up.
constexpr std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

inline std::uint8_t luminance_at(const PixelImage& img, int x, int y) {
  const auto* p = img.pixel(x, y);
  return img.channels() == 1 ? p[0] : luminance(p[0], p[1], p[2]);
}

PixelImage crop(const PixelImage& img, int x, int y, int width, int height);

// Nearest neighbour: src = floor((dst + 0.5) * src_dim / dst_dim).
PixelImage resize(const PixelImage& img, int width, int height);

// Clockwise, lossless; degrees must be 90, 180 or 270.
PixelImage rotate(const PixelImage& img, int degrees);

PixelImage flip(const PixelImage& img, FlipAxis axis);

PixelImage grayscale(const PixelImage& img);

// Per channel: value > level ? 255 : 0.
PixelImage threshold(const PixelImage& img, int level);

class NativeOpRegistry {
 public:
  using ImageFn = std::function<PixelImage(const PixelImage&, const PropertyMap&)>;

  static const NativeOpRegistry& instance();

  bool contains(const std::string& name) const { return ops_.count(name) != 0; }
  const ImageFn& at(const std::string& name) const;
  const std::vector<std::string>& required_options(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  NativeOpRegistry();

  struct Entry {
    ImageFn fn;
    std::vector<std::string> required;
  };
  std::map<std::string, Entry> ops_;
};

// Applies a native op to every frame in order. Errors carry the frame index.
MediaObject apply_native(const OperationSpec& op, const MediaObject& media);

// Frame-wise map helper shared with the worker registry.
MediaObject map_frames(const MediaObject& media,
                       const std::function<PixelImage(const PixelImage&)>& fn);

}  // namespace vdq
