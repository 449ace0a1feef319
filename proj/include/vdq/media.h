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
#include <stdexcept>
#include <string>
#include <vector>

namespace vdq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by image/video operations on bad arguments or out-of-range geometry.
class OpError : public Error {
 public:
  using Error::Error;
};

// Row-major 8-bit raster, 1 (gray) or 3 (R,G,B) interleaved channels.
class PixelImage {
 public:
  PixelImage() = default;
  PixelImage(int width, int height, int channels);
  PixelImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }
  std::vector<std::uint8_t> release() && { return std::move(data_); }

  std::uint8_t* pixel(int x, int y) {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }
  const std::uint8_t* pixel(int x, int y) const {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }
  std::uint8_t& at(int x, int y, int c) { return pixel(x, y)[c]; }
  std::uint8_t at(int x, int y, int c) const { return pixel(x, y)[c]; }

  bool same_shape(const PixelImage& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  bool operator==(const PixelImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class MediaKind { kImage, kVideo };

std::string to_string(MediaKind kind);
MediaKind media_kind_from_string(const std::string& s);

struct FrameRate {
  std::uint32_t num = 25;
  std::uint32_t den = 1;

  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const FrameRate&) const = default;
};

// An image (exactly one frame) or a video (ordered frames sharing one shape).
class MediaObject {
 public:
  MediaObject() = default;

  static MediaObject image(PixelImage frame);
  static MediaObject video(std::vector<PixelImage> frames, FrameRate fps = {});

  MediaKind kind() const { return kind_; }
  bool is_image() const { return kind_ == MediaKind::kImage; }
  const std::vector<PixelImage>& frames() const { return frames_; }
  const PixelImage& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t frame_count() const { return frames_.size(); }
  FrameRate fps() const { return fps_; }

  int width() const { return frames_.empty() ? 0 : frames_.front().width(); }
  int height() const { return frames_.empty() ? 0 : frames_.front().height(); }
  int channels() const { return frames_.empty() ? 0 : frames_.front().channels(); }

  // Free-form label carried alongside the pixels (e.g. the stored "activity"
  // property). Not part of the encoded bytes and not compared by operator==.
  const std::string& label_hint() const { return label_hint_; }
  void set_label_hint(std::string hint) { label_hint_ = std::move(hint); }

  bool operator==(const MediaObject& other) const {
    return kind_ == other.kind_ && fps_ == other.fps_ && frames_ == other.frames_;
  }

 private:
  MediaObject(MediaKind kind, std::vector<PixelImage> frames, FrameRate fps);

  MediaKind kind_ = MediaKind::kImage;
  std::vector<PixelImage> frames_;
  FrameRate fps_;
  std::string label_hint_;
};

}  // namespace vdq
