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

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vdq/media.h"
#include "vdq/metadata.h"

namespace vdq {

// Deterministic stand-in for a face detector: the tight box around every
// pixel whose luminance exceeds the threshold, or {0,0,0,0} when none does.
struct Box {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool degenerate() const { return width == 0 || height == 0; }
  // Integer centre used by the mask operations.
  int center_x() const { return x + width / 2; }
  int center_y() const { return y + height / 2; }
  bool operator==(const Box&) const = default;
};

constexpr int kDefaultLumaThreshold = 200;

Box detect(const PixelImage& img, int luma_threshold = kDefaultLumaThreshold);
std::vector<Box> detect(const MediaObject& media, int luma_threshold = kDefaultLumaThreshold);

// Sigma used when the caller passes sigma <= 0.
double default_gaussian_sigma(int ksize);
// Normalised 1-D kernel of odd length `ksize`.
std::vector<double> gaussian_kernel(int ksize, double sigma);

// Separable convolution with replicated borders; the intermediate pass is
// kept in double precision and rounded once at the end.
PixelImage gaussian_blur(const PixelImage& img, int kernel_w, int kernel_h, double sigma_x,
                         double sigma_y);

// Outline drawn inside `box`, `thickness` pixels wide, in (255,0,0) or 255.
PixelImage draw_box(const PixelImage& img, const Box& box, int thickness);

// Zeroes pixels with (px-cx)^2 + (py-cy)^2 <= r^2 when `inside`, else the rest.
PixelImage mask_disk(const PixelImage& img, int cx, int cy, double radius, bool inside);

// 5x7 glyphs on a 6 px advance; bytes outside ASCII 32..126 render as '?'.
PixelImage draw_text(const PixelImage& img, const std::string& text, int x, int y);

constexpr int kGlyphWidth = 5;
constexpr int kGlyphHeight = 7;
constexpr int kGlyphAdvance = 6;
// Column-major glyph bitmap; bit r of column c is row r (row 0 at the top).
const std::array<std::uint8_t, 5>& glyph(char ch);

// Frames i with t1 <= i / fps < t2, each then cropped to the rectangle.
MediaObject select_interval(const MediaObject& video, double t1, double t2, int x, int y,
                            int width, int height);

class WorkerOpRegistry {
 public:
  using MediaFn = std::function<MediaObject(const MediaObject&, const PropertyMap&)>;

  static const WorkerOpRegistry& instance();

  bool contains(const std::string& name) const { return ops_.count(name) != 0; }
  // Throws OpError for unknown names or bad options.
  MediaObject apply(const std::string& name, const MediaObject& media,
                    const PropertyMap& options) const;
  std::vector<std::string> names() const;

 private:
  WorkerOpRegistry();
  std::map<std::string, MediaFn> ops_;
};

}  // namespace vdq
