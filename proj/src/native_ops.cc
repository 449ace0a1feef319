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

#include "vdq/native_ops.h"

#include <algorithm>

namespace vdq {

PixelImage crop(const PixelImage& img, int x, int y, int width, int height) {
  if (width < 1 || height < 1 || x < 0 || y < 0 || x + width > img.width() ||
      y + height > img.height()) {
    throw OpError("crop rectangle (" + std::to_string(x) + "," + std::to_string(y) + "," +
                  std::to_string(width) + "," + std::to_string(height) +
                  ") out of bounds for " + std::to_string(img.width()) + "x" +
                  std::to_string(img.height()) + " image");
  }
  const int c = img.channels();
  PixelImage out(width, height, c);
  const auto row_bytes = static_cast<std::size_t>(width) * c;
  for (int j = 0; j < height; ++j) {
    std::copy_n(img.pixel(x, y + j), row_bytes, out.pixel(0, j));
  }
  return out;
}

PixelImage resize(const PixelImage& img, int width, int height) {
  if (width < 1 || height < 1) {
    throw OpError("resize target must be positive, got " + std::to_string(width) + "x" +
                  std::to_string(height));
  }
  const int c = img.channels();
  std::vector<int> src_x(width);
  for (int i = 0; i < width; ++i) {
    src_x[i] = static_cast<int>((2LL * i + 1) * img.width() / (2LL * width));
  }
  PixelImage out(width, height, c);
  for (int j = 0; j < height; ++j) {
    const int sy = static_cast<int>((2LL * j + 1) * img.height() / (2LL * height));
    for (int i = 0; i < width; ++i) {
      std::copy_n(img.pixel(src_x[i], sy), c, out.pixel(i, j));
    }
  }
  return out;
}

PixelImage rotate(const PixelImage& img, int degrees) {
  const int w = img.width();
  const int h = img.height();
  const int c = img.channels();
  switch (degrees) {
    case 90: {
      PixelImage out(h, w, c);
      for (int y = 0; y < w; ++y)
        for (int x = 0; x < h; ++x) std::copy_n(img.pixel(y, h - 1 - x), c, out.pixel(x, y));
      return out;
    }
    case 180: {
      PixelImage out(w, h, c);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          std::copy_n(img.pixel(w - 1 - x, h - 1 - y), c, out.pixel(x, y));
      return out;
    }
    case 270: {
      PixelImage out(h, w, c);
      for (int y = 0; y < w; ++y)
        for (int x = 0; x < h; ++x) std::copy_n(img.pixel(w - 1 - y, x), c, out.pixel(x, y));
      return out;
    }
    default:
      throw OpError("unsupported rotation angle " + std::to_string(degrees) +
                    " (expected 90, 180 or 270)");
  }
}

PixelImage flip(const PixelImage& img, FlipAxis axis) {
  const int w = img.width();
  const int h = img.height();
  const int c = img.channels();
  PixelImage out(w, h, c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = axis == FlipAxis::kHorizontal ? w - 1 - x : x;
      const int sy = axis == FlipAxis::kVertical ? h - 1 - y : y;
      std::copy_n(img.pixel(sx, sy), c, out.pixel(x, y));
    }
  }
  return out;
}

PixelImage grayscale(const PixelImage& img) {
  if (img.channels() == 1) return img;
  PixelImage out(img.width(), img.height(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = luminance(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
  }
  return out;
}

PixelImage threshold(const PixelImage& img, int level) {
  PixelImage out = img;
  for (auto& v : out.data()) v = v > level ? 255 : 0;
  return out;
}

namespace {

int int_opt(const PropertyMap& o, const char* key) {
  return static_cast<int>(option_int(o, key));
}

FlipAxis parse_axis(const std::string& s) {
  if (s == "horizontal" || s == "h") return FlipAxis::kHorizontal;
  if (s == "vertical" || s == "v") return FlipAxis::kVertical;
  throw OpError("flip axis must be 'horizontal' or 'vertical', got '" + s + "'");
}

}  // namespace

NativeOpRegistry::NativeOpRegistry() {
  ops_["crop"] = {[](const PixelImage& img, const PropertyMap& o) {
                    return crop(img, int_opt(o, "x"), int_opt(o, "y"), int_opt(o, "width"),
                                int_opt(o, "height"));
                  },
                  {"x", "y", "width", "height"}};
  ops_["resize"] = {[](const PixelImage& img, const PropertyMap& o) {
                      return resize(img, int_opt(o, "width"), int_opt(o, "height"));
                    },
                    {"width", "height"}};
  ops_["rotate"] = {[](const PixelImage& img, const PropertyMap& o) {
                      return rotate(img, int_opt(o, "angle"));
                    },
                    {"angle"}};
  ops_["flip"] = {[](const PixelImage& img, const PropertyMap& o) {
                    return flip(img, parse_axis(option_string(o, "axis")));
                  },
                  {"axis"}};
  ops_["grayscale"] = {[](const PixelImage& img, const PropertyMap&) { return grayscale(img); },
                       {}};
  ops_["threshold"] = {[](const PixelImage& img, const PropertyMap& o) {
                         return threshold(img, int_opt(o, "value"));
                       },
                       {"value"}};
}

const NativeOpRegistry& NativeOpRegistry::instance() {
  static const NativeOpRegistry registry;
  return registry;
}

const NativeOpRegistry::ImageFn& NativeOpRegistry::at(const std::string& name) const {
  auto it = ops_.find(name);
  if (it == ops_.end()) throw OpError("unknown native operation '" + name + "'");
  return it->second.fn;
}

const std::vector<std::string>& NativeOpRegistry::required_options(
    const std::string& name) const {
  auto it = ops_.find(name);
  if (it == ops_.end()) throw OpError("unknown native operation '" + name + "'");
  return it->second.required;
}

std::vector<std::string> NativeOpRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : ops_) out.push_back(name);
  return out;
}

MediaObject map_frames(const MediaObject& media,
                       const std::function<PixelImage(const PixelImage&)>& fn) {
  std::vector<PixelImage> frames;
  frames.reserve(media.frame_count());
  for (std::size_t i = 0; i < media.frame_count(); ++i) {
    try {
      frames.push_back(fn(media.frame(i)));
    } catch (const OpError& e) {
      throw OpError("frame " + std::to_string(i) + ": " + e.what());
    }
  }
  MediaObject out = media.is_image() ? MediaObject::image(std::move(frames.front()))
                                     : MediaObject::video(std::move(frames), media.fps());
  out.set_label_hint(media.label_hint());
  return out;
}

MediaObject apply_native(const OperationSpec& op, const MediaObject& media) {
  if (op.exec_class != ExecClass::kNative) {
    throw OpError("operation '" + op.type + "' is not native");
  }
  const auto& fn = NativeOpRegistry::instance().at(op.type);
  return map_frames(media, [&](const PixelImage& f) { return fn(f, op.options); });
}

}  // namespace vdq
