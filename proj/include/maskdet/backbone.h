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

#include <optional>
#include <string>
#include <vector>

#include "maskdet/layer_spec.h"
#include "maskdet/tensor.h"

namespace maskdet {

// One row of the MobileNetV2 stage table: expansion factor t, output
// channels c, repeats n, stride s of the first block in the group.
struct InvertedResidualSpec {
  int expansion = 1;
  int out_channels = 1;
  int repeats = 1;
  int first_stride = 1;
};

struct BackboneConfig {
  int input_size = 320;
  int stem_channels = 32;
  std::vector<InvertedResidualSpec> stages = {
      {1, 16, 1, 1}, {6, 24, 2, 2}, {6, 32, 3, 2}, {6, 64, 4, 2},
      {6, 96, 3, 1}, {6, 160, 3, 2}, {6, 320, 1, 1}};
  int head_channels = 1280;
  // 1-based stage whose output is the stride-16 feature tap.
  int tap_a_stage = 5;

  void validate() const;
};

// A single expanded block after unrolling the stage table.
struct BlockSpec {
  std::string name;  // "stage{i}.block{j}"
  int stage = 0;     // 1-based
  int block = 0;     // 1-based within the stage
  int expansion = 1;
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;

  int hidden_channels() const { return in_channels * expansion; }
  // Skip connection exists only for stride-1 blocks that keep the width.
  bool has_residual() const { return stride == 1 && in_channels == out_channels; }
};

std::vector<BlockSpec> unroll_blocks(const BackboneConfig& config);

// Every convolution of the backbone in execution order, named per the
// weight container convention (stem.conv, stage{i}.block{j}.{expand,
// depthwise,project}, head.conv).
std::vector<LayerSpec> backbone_layers(const BackboneConfig& config);

struct InvertedResidualWeights {
  std::optional<ConvParams> expand;  // absent when expansion == 1
  DepthwiseParams depthwise;
  ConvParams project;
};

struct BackboneWeights {
  ConvParams stem;
  std::vector<InvertedResidualWeights> blocks;
  ConvParams head;
};

struct FeatureTaps {
  Tensor tap_a;  // stride 16, 96 channels
  Tensor tap_b;  // stride 32, head_channels
};

// expand (1x1 + relu6, skipped for t = 1) -> 3x3 depthwise (+ relu6) ->
// linear 1x1 projection, plus the input when spec.has_residual().
Tensor inverted_residual(const Tensor& input, const BlockSpec& spec,
                         const InvertedResidualWeights& weights);

FeatureTaps backbone_forward(const Tensor& image, const BackboneConfig& config,
                             const BackboneWeights& weights);

}  // namespace maskdet
