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

// Independent reference computations for the operation tests. These follow
// the textbook definitions pixel by pixel and share no code with src/.

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "vdq/media.h"
#include "vdq/metadata_store.h"
#include "support/printers.h"

namespace vdq::testing {

inline std::uint8_t luminance_oracle(int r, int g, int b) {
  // Half-up rounding of the real-valued weighted sum.
  return static_cast<std::uint8_t>(std::floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5 + 1e-9));
}

inline PixelImage crop_oracle(const PixelImage& in, int x, int y, int w, int h) {
  PixelImage out(w, h, in.channels());
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      for (int c = 0; c < in.channels(); ++c) out.at(i, j, c) = in.at(x + i, y + j, c);
  return out;
}

inline PixelImage resize_oracle(const PixelImage& in, int w, int h) {
  PixelImage out(w, h, in.channels());
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const int sx = static_cast<int>(std::floor((i + 0.5) * in.width() / w));
      const int sy = static_cast<int>(std::floor((j + 0.5) * in.height() / h));
      for (int c = 0; c < in.channels(); ++c) out.at(i, j, c) = in.at(sx, sy, c);
    }
  }
  return out;
}

// Direct 2-D convolution with a freshly computed outer-product kernel.
inline std::vector<double> gaussian_2d_oracle(int kw, int kh, double sx, double sy) {
  auto sigma = [](int k, double s) { return s > 0 ? s : 0.3 * ((k - 1) * 0.5 - 1) + 0.8; };
  const double gx = sigma(kw, sx), gy = sigma(kh, sy);
  std::vector<double> k(static_cast<std::size_t>(kw) * kh);
  double sum = 0;
  for (int j = 0; j < kh; ++j) {
    for (int i = 0; i < kw; ++i) {
      const double dx = i - kw / 2, dy = j - kh / 2;
      k[j * kw + i] = std::exp(-dx * dx / (2 * gx * gx) - dy * dy / (2 * gy * gy));
      sum += k[j * kw + i];
    }
  }
  for (auto& v : k) v /= sum;
  return k;
}

inline PixelImage blur_oracle(const PixelImage& in, int kw, int kh, double sx, double sy) {
  const auto k = gaussian_2d_oracle(kw, kh, sx, sy);
  PixelImage out(in.width(), in.height(), in.channels());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      for (int c = 0; c < in.channels(); ++c) {
        double acc = 0;
        for (int j = 0; j < kh; ++j) {
          for (int i = 0; i < kw; ++i) {
            int px = std::min(std::max(x + i - kw / 2, 0), in.width() - 1);
            int py = std::min(std::max(y + j - kh / 2, 0), in.height() - 1);
            acc += k[j * kw + i] * in.at(px, py, c);
          }
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(acc));
      }
    }
  }
  return out;
}

struct BoxOracle {
  int x = 0, y = 0, w = 0, h = 0;
};

inline BoxOracle bright_box_oracle(const PixelImage& img, int threshold) {
  std::vector<std::pair<int, int>> pts;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int l = img.channels() == 1
                  ? img.at(x, y, 0)
                  : luminance_oracle(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      if (l > threshold) pts.emplace_back(x, y);
    }
  }
  if (pts.empty()) return {};
  int x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
  for (auto [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

inline std::set<std::pair<int, int>> disk_oracle(int w, int h, int cx, int cy, double r) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (std::sqrt(double((x - cx) * (x - cx) + (y - cy) * (y - cy))) <= r + 1e-12)
        out.emplace(x, y);
  return out;
}

// Linear scan over every record, evaluating each constraint independently.
inline std::vector<EntityId> filter_oracle(const std::vector<StoreRecord>& records, MediaKind kind,
                                           const std::vector<Constraint>& constraints) {
  std::vector<EntityId> out;
  for (const auto& rec : records) {
    if (rec.kind != kind) continue;
    bool ok = true;
    for (const auto& c : constraints) {
      auto it = rec.properties.find(c.property);
      if (it == rec.properties.end()) {
        ok = false;
        break;
      }
      double a, b;
      bool numeric = !std::holds_alternative<std::string>(it->second);
      int cmp;
      if (numeric) {
        auto num = [](const MetadataValue& v) {
          return std::holds_alternative<std::int64_t>(v) ? double(std::get<std::int64_t>(v))
                                                         : std::get<double>(v);
        };
        a = num(it->second);
        b = num(c.value);
        cmp = a < b ? -1 : (a > b ? 1 : 0);
      } else {
        const auto& sa = std::get<std::string>(it->second);
        const auto& sb = std::get<std::string>(c.value);
        cmp = sa.compare(sb) < 0 ? -1 : (sa.compare(sb) > 0 ? 1 : 0);
      }
      bool pass = false;
      switch (c.comparator) {
        case Comparator::kEq: pass = cmp == 0; break;
        case Comparator::kNe: pass = cmp != 0; break;
        case Comparator::kLt: pass = cmp < 0; break;
        case Comparator::kLe: pass = cmp <= 0; break;
        case Comparator::kGt: pass = cmp > 0; break;
        case Comparator::kGe: pass = cmp >= 0; break;
      }
      if (!pass) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(rec.id);
  }
  return out;
}

}  // namespace vdq::testing
