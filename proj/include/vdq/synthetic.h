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

#include "vdq/media.h"

namespace vdq {

// Deterministic test media: a dim noisy background (luminance <= 150) with
// one bright elliptical blob, so the detect stand-in always finds a box.
PixelImage synthetic_image(std::uint64_t seed, int width, int height, int channels = 3);

// Blob drifts a pixel per frame.
MediaObject synthetic_video(std::uint64_t seed, int width, int height, int frames,
                            FrameRate fps = {25, 1}, int channels = 3);

// Uniform noise, any value.
PixelImage random_image(std::uint64_t seed, int width, int height, int channels);

}  // namespace vdq
