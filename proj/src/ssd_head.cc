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

#include "maskdet/ssd_head.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "maskdet/check.h"

namespace maskdet {

std::size_t AnchorConfig::num_anchors() const {
  std::size_t cells = 0;
  for (int f : feature_map_sizes) cells += static_cast<std::size_t>(f) * f;
  return cells * anchors_per_location();
}

std::vector<double> AnchorConfig::layer_scales() const {
  const std::size_t m = feature_map_sizes.size();
  std::vector<double> scales(m);
  for (std::size_t k = 0; k < m; ++k) {
    scales[k] = m == 1 ? scale_min
                       : scale_min + (scale_max - scale_min) * static_cast<double>(k) /
                                         static_cast<double>(m - 1);
  }
  return scales;
}

void AnchorConfig::validate() const {
  if (feature_map_sizes.empty()) throw std::invalid_argument("anchor config: no layers");
  for (int f : feature_map_sizes) {
    if (f <= 0) throw std::invalid_argument("anchor config: feature map size must be positive");
  }
  if (!(scale_min > 0.0) || !(scale_max > scale_min) || scale_max > 1.0) {
    throw std::invalid_argument("anchor config: need 0 < scale_min < scale_max <= 1");
  }
  if (aspect_ratios.empty()) throw std::invalid_argument("anchor config: no aspect ratios");
  for (double r : aspect_ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("anchor config: aspect ratio must be positive");
  }
  for (double v : variances) {
    if (!(v > 0.0)) throw std::invalid_argument("anchor config: variance must be positive");
  }
}

namespace {

Anchor clip_center(double cx, double cy, double w, double h) {
  const double x0 = std::clamp(cx - w / 2, 0.0, 1.0);
  const double y0 = std::clamp(cy - h / 2, 0.0, 1.0);
  const double x1 = std::clamp(cx + w / 2, 0.0, 1.0);
  const double y1 = std::clamp(cy + h / 2, 0.0, 1.0);
  return {static_cast<float>((x0 + x1) / 2), static_cast<float>((y0 + y1) / 2),
          static_cast<float>(x1 - x0), static_cast<float>(y1 - y0)};
}

}  // namespace

std::vector<Anchor> generate_anchors(const AnchorConfig& config) {
  config.validate();
  const auto scales = config.layer_scales();
  std::vector<Anchor> anchors;
  anchors.reserve(config.num_anchors());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const int f = config.feature_map_sizes[k];
    const double s = scales[k];
    const double s_next = k + 1 < scales.size() ? scales[k + 1] : 1.0;
    const double s_extra = std::sqrt(s * s_next);
    for (int i = 0; i < f; ++i) {
      for (int j = 0; j < f; ++j) {
        const double cx = (j + 0.5) / f;
        const double cy = (i + 0.5) / f;
        for (double r : config.aspect_ratios) {
          const double sr = std::sqrt(r);
          anchors.push_back(clip_center(cx, cy, s * sr, s / sr));
        }
        anchors.push_back(clip_center(cx, cy, s_extra, s_extra));
      }
    }
  }
  return anchors;
}

std::vector<LayerSpec> extra_layers(const BackboneConfig& backbone,
                                    const HeadConfig& head) {
  std::vector<LayerSpec> layers;
  int in = backbone.head_channels;
  for (std::size_t k = 0; k < head.extra_channels.size(); ++k) {
    const std::string prefix = "extra" + std::to_string(k + 1);
    const auto [mid, out] = head.extra_channels[k];
    layers.push_back({prefix + ".squeeze", LayerKind::kConv, 1, in, mid, 1, 0});
    layers.push_back({prefix + ".conv", LayerKind::kConv, 3, mid, out, 2, 1});
    in = out;
  }
  return layers;
}

std::vector<LayerSpec> predictor_layers(const BackboneConfig& backbone,
                                        const HeadConfig& head) {
  std::vector<int> widths = {backbone.stages.at(backbone.tap_a_stage - 1).out_channels,
                             backbone.head_channels};
  for (const auto& e : head.extra_channels) widths.push_back(e[1]);
  const int a = head.anchors.anchors_per_location();
  std::vector<LayerSpec> layers;
  for (std::size_t m = 0; m < widths.size(); ++m) {
    const std::string prefix = "predictor" + std::to_string(m + 1);
    layers.push_back({prefix + ".class", LayerKind::kConv, 3, widths[m],
                      a * head.scores_per_anchor(), 1, 1});
    layers.push_back({prefix + ".box", LayerKind::kConv, 3, widths[m], a * 4, 1, 1});
  }
  return layers;
}

std::vector<Tensor> extra_feature_layers(const Tensor& tap_b,
                                         std::span<const ExtraBlockWeights> weights) {
  std::vector<Tensor> maps;
  const Tensor* x = &tap_b;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const auto& w = weights[k];
    if (w.conv.kernel_h != 3 || w.conv.stride != 2 || w.conv.padding != 1 ||
        w.squeeze.kernel_h != 1) {
      throw std::invalid_argument("extra" + std::to_string(k + 1) +
                                  ": expected 1x1 squeeze and 3x3/s2/p1 conv");
    }
    Tensor squeezed = relu6(conv2d(*x, w.squeeze));
    maps.push_back(relu6(conv2d(squeezed, w.conv)));
    x = &maps.back();
  }
  return maps;
}

RawPredictions head_forward(const FeatureTaps& taps, std::span<const Tensor> extras,
                            std::span<const PredictorWeights> weights,
                            const HeadConfig& config) {
  std::vector<const Tensor*> maps = {&taps.tap_a, &taps.tap_b};
  for (const auto& e : extras) maps.push_back(&e);
  const auto& sizes = config.anchors.feature_map_sizes;
  MASKDET_CHECK(maps.size() == sizes.size(), "feature map count != anchor layer count");
  MASKDET_CHECK(weights.size() == maps.size(), "predictor count != feature map count");

  const int a = config.anchors.anchors_per_location();
  const int k1 = config.scores_per_anchor();
  RawPredictions out;
  out.scores_per_anchor = k1;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const Tensor& fm = *maps[m];
    MASKDET_CHECK(fm.height() == sizes[m] && fm.width() == sizes[m],
                  "feature map size does not match anchor grid");
    Tensor cls = conv2d(fm, weights[m].cls);
    Tensor box = conv2d(fm, weights[m].box);
    MASKDET_CHECK(cls.channels() == a * k1 && box.channels() == a * 4,
                  "predictor width does not match anchors per location");
    out.class_logits.insert(out.class_logits.end(), cls.values().begin(),
                            cls.values().end());
    out.box_offsets.insert(out.box_offsets.end(), box.values().begin(),
                           box.values().end());
    out.num_anchors += sizes[m] * sizes[m] * a;
  }
  MASKDET_CHECK(static_cast<std::size_t>(out.num_anchors) == config.anchors.num_anchors(),
                "prediction rows != anchor count");
  return out;
}

std::vector<float> softmax_scores(std::span<const float> logits) {
  std::vector<float> out(logits.size());
  if (logits.empty()) return out;
  const float mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  std::vector<double> e(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(static_cast<double>(logits[i]) - mx);
    sum += e[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = static_cast<float>(e[i] / sum);
  return out;
}

namespace {
constexpr double kMaxLogScale = 10.0;
}

Anchor decode_box(const BoxEncoding& t, const Anchor& a,
                  const std::array<double, 4>& v) {
  const double cx = a.cx + t.tx * v[0] * a.w;
  const double cy = a.cy + t.ty * v[1] * a.h;
  const double w = a.w * std::exp(std::min(t.tw * v[2], kMaxLogScale));
  const double h = a.h * std::exp(std::min(t.th * v[3], kMaxLogScale));
  return {static_cast<float>(cx), static_cast<float>(cy), static_cast<float>(w),
          static_cast<float>(h)};
}

BoxEncoding encode_box(const Anchor& b, const Anchor& a,
                       const std::array<double, 4>& v) {
  if (!(a.w > 0.0f) || !(a.h > 0.0f) || !(b.w > 0.0f) || !(b.h > 0.0f)) {
    throw std::invalid_argument("encode_box: box and anchor sizes must be positive");
  }
  return {(static_cast<double>(b.cx) - a.cx) / (v[0] * a.w),
          (static_cast<double>(b.cy) - a.cy) / (v[1] * a.h),
          std::log(static_cast<double>(b.w) / a.w) / v[2],
          std::log(static_cast<double>(b.h) / a.h) / v[3]};
}

std::vector<DecodedBox> decode_boxes(const RawPredictions& preds,
                                     std::span<const Anchor> anchors,
                                     const std::array<double, 4>& variances) {
  MASKDET_CHECK(static_cast<std::size_t>(preds.num_anchors) == anchors.size(),
                "prediction rows != anchor count");
  const std::size_t k1 = static_cast<std::size_t>(preds.scores_per_anchor);
  std::vector<DecodedBox> out(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const float* t = preds.box_offsets.data() + i * 4;
    Anchor d = decode_box({t[0], t[1], t[2], t[3]}, anchors[i], variances);
    Anchor c = clip_center(d.cx, d.cy, d.w, d.h);
    out[i].cx = c.cx;
    out[i].cy = c.cy;
    out[i].w = c.w;
    out[i].h = c.h;
    out[i].probs = softmax_scores(
        std::span<const float>(preds.class_logits.data() + i * k1, k1));
  }
  return out;
}

}  // namespace maskdet
