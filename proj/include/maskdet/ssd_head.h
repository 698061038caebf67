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

#pragma once

#include <array>
#include <span>
#include <vector>

#include "maskdet/backbone.h"
#include "maskdet/layer_spec.h"
#include "maskdet/tensor.h"

namespace maskdet {

struct AnchorConfig {
  std::vector<int> feature_map_sizes = {20, 10, 5, 3, 2, 1};
  double scale_min = 0.2;
  double scale_max = 0.95;
  std::vector<double> aspect_ratios = {1.0, 2.0, 0.5, 3.0, 1.0 / 3.0};
  // Center offsets scaled by variances[0..1], log sizes by variances[2..3].
  std::array<double, 4> variances = {0.1, 0.1, 0.2, 0.2};

  // One box per aspect ratio plus the extra ratio-1 box at the geometric
  // mean of this layer's and the next layer's scale.
  int anchors_per_location() const {
    return static_cast<int>(aspect_ratios.size()) + 1;
  }
  std::size_t num_anchors() const;
  // s_k = min + (max - min)(k - 1)/(m - 1), k = 1..m.
  std::vector<double> layer_scales() const;
  void validate() const;
};

// Normalized center-form box.
struct Anchor {
  float cx = 0, cy = 0, w = 0, h = 0;
};

struct BoxEncoding {
  double tx = 0, ty = 0, tw = 0, th = 0;
};

// Layer-major, then row-major cells, then ratio order; the extra box is the
// last of each cell. Anchors are clipped to [0,1] in corner form.
std::vector<Anchor> generate_anchors(const AnchorConfig& config);

struct HeadConfig {
  int num_classes = 2;  // foreground; the head adds background at index 0
  // 1x1 squeeze width and 3x3 stride-2 output width of each extra block.
  std::vector<std::array<int, 2>> extra_channels = {
      {256, 512}, {128, 256}, {128, 256}, {64, 128}};
  AnchorConfig anchors;

  int scores_per_anchor() const { return num_classes + 1; }
};

std::vector<LayerSpec> extra_layers(const BackboneConfig& backbone,
                                    const HeadConfig& head);
std::vector<LayerSpec> predictor_layers(const BackboneConfig& backbone,
                                        const HeadConfig& head);

struct ExtraBlockWeights {
  ConvParams squeeze;
  ConvParams conv;
};

struct PredictorWeights {
  ConvParams cls;
  ConvParams box;
};

// Four blocks of 1x1 squeeze + relu6 and 3x3/stride-2/pad-1 conv + relu6.
std::vector<Tensor> extra_feature_layers(const Tensor& tap_b,
                                         std::span<const ExtraBlockWeights> weights);

struct RawPredictions {
  int num_anchors = 0;
  int scores_per_anchor = 0;
  std::vector<float> class_logits;  // [num_anchors x scores_per_anchor]
  std::vector<float> box_offsets;   // [num_anchors x 4], (tx, ty, tw, th)
};

// Applies one class conv and one box conv per feature map and flattens in
// generate_anchors() order.
RawPredictions head_forward(const FeatureTaps& taps, std::span<const Tensor> extras,
                            std::span<const PredictorWeights> weights,
                            const HeadConfig& config);

// Stable softmax (max-subtracted).
std::vector<float> softmax_scores(std::span<const float> logits);

struct DecodedBox {
  float cx = 0, cy = 0, w = 0, h = 0;
  std::vector<float> probs;  // length num_classes + 1, background first
};

// Decodes one offset relative to its anchor; tw*vw and th*vh are clamped to
// <= 10 before exponentiation. The result is not clipped.
Anchor decode_box(const BoxEncoding& t, const Anchor& anchor,
                  const std::array<double, 4>& variances);
BoxEncoding encode_box(const Anchor& box, const Anchor& anchor,
                       const std::array<double, 4>& variances);

// Softmax + decode + corner-form clipping to [0,1] for every anchor.
std::vector<DecodedBox> decode_boxes(const RawPredictions& preds,
                                     std::span<const Anchor> anchors,
                                     const std::array<double, 4>& variances);

}  // namespace maskdet
