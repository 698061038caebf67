// Copyright 2026 The maskdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskdet/augment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maskdet {

std::vector<LabeledBox> boxes_from_annotation(const Annotation& a) {
  std::vector<LabeledBox> out;
  for (const auto& o : a.objects) {
    out.push_back({o.name, {double(o.xmin), double(o.ymin), double(o.xmax), double(o.ymax)}, 1.0});
  }
  return out;
}

Annotation annotation_with_boxes(const Annotation& base, const std::vector<LabeledBox>& boxes) {
  Annotation a = base;
  a.objects.clear();
  for (const auto& b : boxes) {
    ObjectBox o;
    o.name = b.name;
    o.xmin = std::clamp(static_cast<int>(std::floor(b.box.x_min + 0.5)), 0, a.width);
    o.ymin = std::clamp(static_cast<int>(std::floor(b.box.y_min + 0.5)), 0, a.height);
    o.xmax = std::clamp(static_cast<int>(std::ceil(b.box.x_max - 0.5)), 0, a.width);
    o.ymax = std::clamp(static_cast<int>(std::ceil(b.box.y_max - 0.5)), 0, a.height);
    if (o.xmin < o.xmax && o.ymin < o.ymax) a.objects.push_back(o);
  }
  return a;
}

void MixupConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("mixup alpha must be positive");
  }
}

double sample_lambda(Rng& rng, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mixup alpha must be positive");
  return rng.beta(alpha, alpha);
}

MixupSample mixup(const MixupSample& a, const MixupSample& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("mixup lambda must be in [0, 1]");
  }
  if (!a.image.same_shape(b.image)) throw std::invalid_argument("mixup: image shapes differ");
  if (a.label.size() != b.label.size()) throw std::invalid_argument("mixup: label sizes differ");

  // The larger coefficient is derived from the smaller one (exact by
  // Sterbenz for values >= 0.5), which makes the pair exactly complementary
  // and the operation exactly symmetric under (a, b, l) <-> (b, a, 1 - l).
  double wa, wb;
  if (lambda >= 0.5) {
    wa = lambda;
    wb = 1.0 - lambda;
  } else {
    wb = 1.0 - lambda;
    wa = 1.0 - wb;
  }

  MixupSample out;
  std::vector<float> px(a.image.size());
  auto xa = a.image.data();
  auto xb = b.image.data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = static_cast<float>(wa * xa[i] + wb * xb[i]);
  }
  out.image = Tensor(a.image.height(), a.image.width(), a.image.channels(), std::move(px));
  out.label.resize(a.label.size());
  for (std::size_t i = 0; i < out.label.size(); ++i) {
    out.label[i] = wa * a.label[i] + wb * b.label[i];
  }
  for (const auto& box : a.boxes) out.boxes.push_back({box.name, box.box, box.weight * wa});
  for (const auto& box : b.boxes) out.boxes.push_back({box.name, box.box, box.weight * wb});
  return out;
}

namespace {

Box clip(const Box& b, int w, int h) {
  return {std::clamp(b.x_min, 0.0, double(w)), std::clamp(b.y_min, 0.0, double(h)),
          std::clamp(b.x_max, 0.0, double(w)), std::clamp(b.y_max, 0.0, double(h))};
}

// Keeps `moved` clipped to the frame if enough of it stays visible.
void keep_visible(std::vector<LabeledBox>& out, const LabeledBox& src, const Box& moved, int w,
                  int h, double min_visible) {
  const Box clipped = clip(moved, w, h);
  if (!clipped.valid()) return;
  if (clipped.area() < min_visible * moved.area()) return;
  out.push_back({src.name, clipped, src.weight});
}

}  // namespace

Augmented flip_horizontal(const Tensor& image, const std::vector<LabeledBox>& boxes) {
  const int w = image.width();
  Tensor out(image.height(), w, image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < image.channels(); ++c) out.at(y, x, c) = image.at(y, w - 1 - x, c);
    }
  }
  std::vector<LabeledBox> flipped;
  for (const auto& b : boxes) {
    flipped.push_back({b.name, {w - b.box.x_max, b.box.y_min, w - b.box.x_min, b.box.y_max}, b.weight});
  }
  return {std::move(out), std::move(flipped)};
}

Augmented translate(const Tensor& image, const std::vector<LabeledBox>& boxes, int dx, int dy,
                    double min_visible) {
  const int w = image.width();
  const int h = image.height();
  Tensor out(h, w, image.channels());
  for (int y = 0; y < h; ++y) {
    const int sy = y - dy;
    if (sy < 0 || sy >= h) continue;
    for (int x = 0; x < w; ++x) {
      const int sx = x - dx;
      if (sx < 0 || sx >= w) continue;
      for (int c = 0; c < image.channels(); ++c) out.at(y, x, c) = image.at(sy, sx, c);
    }
  }
  std::vector<LabeledBox> moved;
  for (const auto& b : boxes) {
    const Box m{b.box.x_min + dx, b.box.y_min + dy, b.box.x_max + dx, b.box.y_max + dy};
    keep_visible(moved, b, m, w, h, min_visible);
  }
  return {std::move(out), std::move(moved)};
}

namespace {

// cos/sin with exact values on multiples of 90 degrees.
std::pair<double, double> cos_sin_degrees(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0) return {1.0, 0.0};
  if (r == 90.0) return {0.0, 1.0};
  if (r == 180.0) return {-1.0, 0.0};
  if (r == 270.0) return {0.0, -1.0};
  const double rad = r * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

}  // namespace

Augmented rotate(const Tensor& image, const std::vector<LabeledBox>& boxes, double degrees,
                 double min_visible) {
  if (!std::isfinite(degrees)) throw std::invalid_argument("rotate: angle must be finite");
  const int w = image.width();
  const int h = image.height();
  const int channels = image.channels();
  const auto [cs, sn] = cos_sin_degrees(degrees);
  const double cx = w / 2.0;
  const double cy = h / 2.0;

  // Forward map (y axis points down, positive angle turns counterclockwise
  // on screen):
  //   x' = cx + (x - cx) cos + (y - cy) sin
  //   y' = cy - (x - cx) sin + (y - cy) cos
  Tensor out(h, w, channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = x + 0.5 - cx;
      const double v = y + 0.5 - cy;
      // Inverse map back to the source, in pixel-index coordinates.
      const double sx = cx + u * cs - v * sn - 0.5;
      const double sy = cy + u * sn + v * cs - 0.5;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      if (fx0 < -1.0 || fy0 < -1.0 || fx0 > w || fy0 > h) continue;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double ax = sx - x0;
      const double ay = sy - y0;
      const double wts[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
      const int px[4] = {x0, x0 + 1, x0, x0 + 1};
      const int py[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          if (wts[k] == 0.0) continue;
          if (px[k] < 0 || px[k] >= w || py[k] < 0 || py[k] >= h) continue;
          acc += wts[k] * image.at(py[k], px[k], c);
        }
        out.at(y, x, c) = static_cast<float>(acc);
      }
    }
  }

  std::vector<LabeledBox> rotated;
  for (const auto& b : boxes) {
    const double xs[2] = {b.box.x_min, b.box.x_max};
    const double ys[2] = {b.box.y_min, b.box.y_max};
    Box hull{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (double x : xs) {
      for (double y : ys) {
        const double rx = cx + (x - cx) * cs + (y - cy) * sn;
        const double ry = cy - (x - cx) * sn + (y - cy) * cs;
        hull.x_min = std::min(hull.x_min, rx);
        hull.y_min = std::min(hull.y_min, ry);
        hull.x_max = std::max(hull.x_max, rx);
        hull.y_max = std::max(hull.y_max, ry);
      }
    }
    keep_visible(rotated, b, hull, w, h, min_visible);
  }
  return {std::move(out), std::move(rotated)};
}

}  // namespace maskdet
