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

#include "vdq/worker_ops.h"

#include <algorithm>
#include <cmath>

#include "vdq/native_ops.h"

namespace vdq {

Box detect(const PixelImage& img, int luma_threshold) {
  int min_x = img.width(), min_y = img.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (luminance_at(img, x, y) > luma_threshold) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    }
  }
  if (max_x < 0) return {};
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

std::vector<Box> detect(const MediaObject& media, int luma_threshold) {
  std::vector<Box> out;
  for (const auto& f : media.frames()) out.push_back(detect(f, luma_threshold));
  return out;
}

double default_gaussian_sigma(int ksize) { return 0.3 * ((ksize - 1) * 0.5 - 1) + 0.8; }

std::vector<double> gaussian_kernel(int ksize, double sigma) {
  if (ksize < 1 || ksize % 2 == 0) {
    throw OpError("gaussian kernel size must be odd and positive, got " + std::to_string(ksize));
  }
  if (sigma <= 0) sigma = default_gaussian_sigma(ksize);
  std::vector<double> k(ksize);
  const int c = ksize / 2;
  double sum = 0;
  for (int i = 0; i < ksize; ++i) {
    k[i] = std::exp(-static_cast<double>((i - c) * (i - c)) / (2 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

PixelImage gaussian_blur(const PixelImage& img, int kernel_w, int kernel_h, double sigma_x,
                         double sigma_y) {
  const auto kx = gaussian_kernel(kernel_w, sigma_x);
  const auto ky = gaussian_kernel(kernel_h, sigma_y);
  const int w = img.width(), h = img.height(), ch = img.channels();
  const int cx = kernel_w / 2, cy = kernel_h / 2;

  std::vector<double> tmp(static_cast<std::size_t>(w) * h * ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0;
        for (int i = 0; i < kernel_w; ++i) {
          const int sx = std::clamp(x + i - cx, 0, w - 1);
          acc += kx[i] * img.at(sx, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  PixelImage out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0;
        for (int j = 0; j < kernel_h; ++j) {
          const int sy = std::clamp(y + j - cy, 0, h - 1);
          acc += ky[j] * tmp[(static_cast<std::size_t>(sy) * w + x) * ch + c];
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(acc), 0, 255));
      }
    }
  }
  return out;
}

PixelImage draw_box(const PixelImage& img, const Box& box, int thickness) {
  PixelImage out = img;
  if (box.degenerate() || thickness <= 0) return out;
  const int x0 = std::max(box.x, 0), y0 = std::max(box.y, 0);
  const int x1 = std::min(box.x + box.width, img.width());
  const int y1 = std::min(box.y + box.height, img.height());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool edge = x - box.x < thickness || box.x + box.width - 1 - x < thickness ||
                        y - box.y < thickness || box.y + box.height - 1 - y < thickness;
      if (!edge) continue;
      auto* p = out.pixel(x, y);
      if (img.channels() == 1) {
        p[0] = 255;
      } else {
        p[0] = 255;
        p[1] = 0;
        p[2] = 0;
      }
    }
  }
  return out;
}

PixelImage mask_disk(const PixelImage& img, int cx, int cy, double radius, bool inside) {
  PixelImage out = img;
  const double r2 = radius * radius;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx, dy = y - cy;
      const bool in_disk = dx * dx + dy * dy <= r2;
      if (in_disk == inside) std::fill_n(out.pixel(x, y), img.channels(), std::uint8_t{0});
    }
  }
  return out;
}

PixelImage draw_text(const PixelImage& img, const std::string& text, int x, int y) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) {
    throw OpError("caption anchor (" + std::to_string(x) + "," + std::to_string(y) +
                  ") outside " + std::to_string(img.width()) + "x" +
                  std::to_string(img.height()) + " frame");
  }
  PixelImage out = img;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const auto& g = glyph(text[k]);
    const int gx = x + static_cast<int>(k) * kGlyphAdvance;
    if (gx >= img.width()) break;
    for (int col = 0; col < kGlyphWidth; ++col) {
      const int px = gx + col;
      if (px >= img.width()) break;
      for (int row = 0; row < kGlyphHeight; ++row) {
        const int py = y + row;
        if (py >= img.height()) break;
        if (g[col] & (1u << row)) std::fill_n(out.pixel(px, py), img.channels(), std::uint8_t{255});
      }
    }
  }
  return out;
}

MediaObject select_interval(const MediaObject& video, double t1, double t2, int x, int y,
                            int width, int height) {
  if (video.is_image()) throw OpError("select requires a video");
  if (!(t1 >= 0) || !(t1 < t2)) {
    throw OpError("select interval must satisfy 0 <= t1 < t2, got [" + std::to_string(t1) +
                  ", " + std::to_string(t2) + ")");
  }
  const double fps = video.fps().value();
  std::vector<PixelImage> frames;
  for (std::size_t i = 0; i < video.frame_count(); ++i) {
    const double t = static_cast<double>(i) / fps;
    if (t >= t1 && t < t2) frames.push_back(crop(video.frame(i), x, y, width, height));
  }
  if (frames.empty()) throw OpError("select interval contains no frames");
  MediaObject out = MediaObject::video(std::move(frames), video.fps());
  out.set_label_hint(video.label_hint());
  return out;
}

namespace {

int luma_opt(const PropertyMap& o) {
  return static_cast<int>(option_int(o, "luma_threshold", kDefaultLumaThreshold));
}

double radius_opt(const PropertyMap& o, const char* key) {
  const double r = option_double(o, key);
  if (r < 0) throw OpError("radius must be non-negative");
  return r;
}

std::pair<double, double> factors(const PropertyMap& o) {
  const double fx = option_double(o, "X");
  const double fy = option_double(o, "Y");
  if (!(fx > 0) || !(fy > 0)) throw OpError("scale factors X and Y must be positive");
  return {fx, fy};
}

int scaled(int dim, double factor) {
  return std::max(1, static_cast<int>(std::lround(dim * factor)));
}

}  // namespace

WorkerOpRegistry::WorkerOpRegistry() {
  // Every native op can be remoted unchanged.
  for (const auto& name : NativeOpRegistry::instance().names()) {
    ops_[name] = [name](const MediaObject& m, const PropertyMap& o) {
      return apply_native(OperationSpec::native(name, o), m);
    };
  }

  ops_["gaussianblur"] = [](const MediaObject& m, const PropertyMap& o) {
    const int kw = static_cast<int>(option_int(o, "kernel_w"));
    const int kh = static_cast<int>(option_int(o, "kernel_h"));
    const double sx = option_double(o, "sigmaX", 0.0);
    const double sy = option_double(o, "sigmaY", 0.0);
    return map_frames(m, [&](const PixelImage& f) { return gaussian_blur(f, kw, kh, sx, sy); });
  };

  ops_["facedetect_box"] = [](const MediaObject& m, const PropertyMap& o) {
    const int luma = luma_opt(o);
    const int thickness = static_cast<int>(option_int(o, "thickness", 2));
    return map_frames(m, [&](const PixelImage& f) {
      return draw_box(f, detect(f, luma), thickness);
    });
  };
  ops_["facedetect"] = ops_["facedetect_box"];

  ops_["facedetect_mask"] = [](const MediaObject& m, const PropertyMap& o) {
    const int luma = luma_opt(o);
    const double r = radius_opt(o, "radius");
    return map_frames(m, [&](const PixelImage& f) {
      const Box b = detect(f, luma);
      if (b.degenerate()) return f;
      return mask_disk(f, b.center_x(), b.center_y(), r, /*inside=*/true);
    });
  };

  // Without an explicit radius the disk is the one circumscribing the box.
  ops_["manipulation"] = [](const MediaObject& m, const PropertyMap& o) {
    const int luma = luma_opt(o);
    const bool has_radius = o.count("radius") != 0;
    const double r = has_radius ? radius_opt(o, "radius") : 0.0;
    return map_frames(m, [&](const PixelImage& f) {
      const Box b = detect(f, luma);
      if (b.degenerate()) return PixelImage(f.width(), f.height(), f.channels());
      const double radius =
          has_radius ? r : 0.5 * std::hypot(static_cast<double>(b.width), b.height);
      return mask_disk(f, b.center_x(), b.center_y(), radius, /*inside=*/false);
    });
  };

  ops_["upsample"] = [](const MediaObject& m, const PropertyMap& o) {
    const auto [fx, fy] = factors(o);
    return map_frames(m, [&](const PixelImage& f) {
      return resize(f, scaled(f.width(), fx), scaled(f.height(), fy));
    });
  };

  ops_["downsample"] = [](const MediaObject& m, const PropertyMap& o) {
    const auto [fx, fy] = factors(o);
    return map_frames(m, [&](const PixelImage& f) {
      return resize(f, scaled(f.width(), 1.0 / fx), scaled(f.height(), 1.0 / fy));
    });
  };

  ops_["caption"] = [](const MediaObject& m, const PropertyMap& o) {
    const auto text = option_string(o, "text");
    const int x = static_cast<int>(option_int(o, "x"));
    const int y = static_cast<int>(option_int(o, "y"));
    return map_frames(m, [&](const PixelImage& f) { return draw_text(f, text, x, y); });
  };

  ops_["select"] = [](const MediaObject& m, const PropertyMap& o) {
    const double t1 = option_double(o, "t1");
    const double t2 = option_double(o, "t2");
    const int x = static_cast<int>(option_int(o, "x", 0));
    const int y = static_cast<int>(option_int(o, "y", 0));
    const int w = static_cast<int>(option_int(o, "width", m.width() - x));
    const int h = static_cast<int>(option_int(o, "height", m.height() - y));
    return select_interval(m, t1, t2, x, y, w, h);
  };

  // Recognition stand-in: the label comes from the options, else from the
  // media's activity hint, else "unknown".
  ops_["activity_label"] = [](const MediaObject& m, const PropertyMap& o) {
    std::string label = m.label_hint().empty() ? "unknown" : m.label_hint();
    label = option_string(o, "label", label);
    return map_frames(m, [&](const PixelImage& f) { return draw_text(f, label, 0, 0); });
  };
}

const WorkerOpRegistry& WorkerOpRegistry::instance() {
  static const WorkerOpRegistry registry;
  return registry;
}

MediaObject WorkerOpRegistry::apply(const std::string& name, const MediaObject& media,
                                    const PropertyMap& options) const {
  auto it = ops_.find(name);
  if (it == ops_.end()) throw OpError("unknown operation '" + name + "'");
  return it->second(media, options);
}

std::vector<std::string> WorkerOpRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : ops_) out.push_back(name);
  return out;
}

}  // namespace vdq
