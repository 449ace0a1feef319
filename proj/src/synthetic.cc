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

#include "vdq/synthetic.h"

#include <algorithm>
#include <random>

namespace vdq {

namespace {

// Raw engine output only; std distributions differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

struct Blob {
  int cx, cy, rx, ry;
  std::uint8_t level;
};

void paint(PixelImage& img, Rng& rng, const Blob& blob) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = double(x - blob.cx) / blob.rx;
      const double dy = double(y - blob.cy) / blob.ry;
      const bool inside = dx * dx + dy * dy <= 1.0;
      for (int c = 0; c < img.channels(); ++c) {
        img.at(x, y, c) = inside ? static_cast<std::uint8_t>(blob.level - rng.below(8))
                                 : static_cast<std::uint8_t>(rng.below(151));
      }
    }
  }
}

Blob make_blob(Rng& rng, int width, int height) {
  Blob b;
  b.rx = 1 + static_cast<int>(rng.below(std::max(1, width / 6)));
  b.ry = 1 + static_cast<int>(rng.below(std::max(1, height / 6)));
  b.cx = static_cast<int>(rng.below(width));
  b.cy = static_cast<int>(rng.below(height));
  b.level = static_cast<std::uint8_t>(240 + rng.below(16));
  return b;
}

}  // namespace

PixelImage synthetic_image(std::uint64_t seed, int width, int height, int channels) {
  Rng rng(seed);
  PixelImage img(width, height, channels);
  paint(img, rng, make_blob(rng, width, height));
  return img;
}

MediaObject synthetic_video(std::uint64_t seed, int width, int height, int frames, FrameRate fps,
                            int channels) {
  Rng rng(seed);
  Blob blob = make_blob(rng, width, height);
  std::vector<PixelImage> out;
  out.reserve(frames);
  for (int i = 0; i < frames; ++i) {
    PixelImage img(width, height, channels);
    paint(img, rng, blob);
    out.push_back(std::move(img));
    blob.cx = (blob.cx + 1) % width;
  }
  return MediaObject::video(std::move(out), fps);
}

PixelImage random_image(std::uint64_t seed, int width, int height, int channels) {
  Rng rng(seed);
  PixelImage img(width, height, channels);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

}  // namespace vdq
