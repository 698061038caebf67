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

#include "maskdet/backbone.h"

#include <stdexcept>
#include <string>

namespace maskdet {
namespace {

void expect_conv(const ConvParams& p, const std::string& name, int k, int in,
                 int out, int stride) {
  p.validate();
  if (p.kernel_h != k || p.kernel_w != k || p.in_channels != in ||
      p.out_channels != out || p.stride != stride) {
    throw std::invalid_argument(
        name + ": expected " + std::to_string(k) + "x" + std::to_string(k) + " conv " +
        std::to_string(in) + "->" + std::to_string(out) + " stride " +
        std::to_string(stride) + ", got " + std::to_string(p.kernel_h) + "x" +
        std::to_string(p.kernel_w) + " " + std::to_string(p.in_channels) + "->" +
        std::to_string(p.out_channels) + " stride " + std::to_string(p.stride));
  }
}

}  // namespace

void BackboneConfig::validate() const {
  if (input_size <= 0 || stem_channels <= 0 || head_channels <= 0) {
    throw std::invalid_argument("backbone config: sizes must be positive");
  }
  if (stages.empty()) throw std::invalid_argument("backbone config: no stages");
  for (const auto& s : stages) {
    if (s.expansion < 1 || s.out_channels < 1 || s.repeats < 1 ||
        (s.first_stride != 1 && s.first_stride != 2)) {
      throw std::invalid_argument("backbone config: invalid stage entry");
    }
  }
  if (tap_a_stage < 1 || tap_a_stage > static_cast<int>(stages.size())) {
    throw std::invalid_argument("backbone config: tap_a_stage out of range");
  }
}

std::vector<BlockSpec> unroll_blocks(const BackboneConfig& config) {
  config.validate();
  std::vector<BlockSpec> blocks;
  int in = config.stem_channels;
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const auto& stage = config.stages[i];
    for (int j = 0; j < stage.repeats; ++j) {
      BlockSpec b;
      b.stage = static_cast<int>(i) + 1;
      b.block = j + 1;
      b.name = "stage" + std::to_string(b.stage) + ".block" + std::to_string(b.block);
      b.expansion = stage.expansion;
      b.in_channels = in;
      b.out_channels = stage.out_channels;
      b.stride = j == 0 ? stage.first_stride : 1;
      blocks.push_back(b);
      in = stage.out_channels;
    }
  }
  return blocks;
}

std::vector<LayerSpec> backbone_layers(const BackboneConfig& config) {
  std::vector<LayerSpec> layers;
  layers.push_back({"stem.conv", LayerKind::kConv, 3, 3, config.stem_channels, 2, 1});
  for (const auto& b : unroll_blocks(config)) {
    const int hidden = b.hidden_channels();
    if (b.expansion != 1) {
      layers.push_back({b.name + ".expand", LayerKind::kConv, 1, b.in_channels, hidden, 1, 0});
    }
    layers.push_back({b.name + ".depthwise", LayerKind::kDepthwise, 3, hidden, hidden,
                      b.stride, 1});
    layers.push_back({b.name + ".project", LayerKind::kConv, 1, hidden, b.out_channels, 1, 0});
  }
  layers.push_back({"head.conv", LayerKind::kConv, 1, config.stages.back().out_channels,
                    config.head_channels, 1, 0});
  return layers;
}

Tensor inverted_residual(const Tensor& input, const BlockSpec& spec,
                         const InvertedResidualWeights& w) {
  if (input.channels() != spec.in_channels) {
    throw std::invalid_argument(spec.name + ": input has " +
                                std::to_string(input.channels()) +
                                " channels, block expects " +
                                std::to_string(spec.in_channels));
  }
  const int hidden = spec.hidden_channels();
  if (spec.expansion == 1 && w.expand) {
    throw std::invalid_argument(spec.name + ": unexpected expand weights for t=1");
  }
  if (spec.expansion != 1 && !w.expand) {
    throw std::invalid_argument(spec.name + ": missing expand weights");
  }

  Tensor x;
  if (w.expand) {
    expect_conv(*w.expand, spec.name + ".expand", 1, spec.in_channels, hidden, 1);
    x = conv2d(input, *w.expand);
    relu6_inplace(x);
  }
  w.depthwise.validate();
  if (w.depthwise.channels != hidden || w.depthwise.stride != spec.stride) {
    throw std::invalid_argument(spec.name + ".depthwise: expected " +
                                std::to_string(hidden) + " channels stride " +
                                std::to_string(spec.stride));
  }
  x = depthwise_conv2d(w.expand ? x : input, w.depthwise);
  relu6_inplace(x);

  expect_conv(w.project, spec.name + ".project", 1, hidden, spec.out_channels, 1);
  x = conv2d(x, w.project);  // linear bottleneck: no activation
  if (spec.has_residual()) x = add(x, input);
  return x;
}

FeatureTaps backbone_forward(const Tensor& image, const BackboneConfig& config,
                             const BackboneWeights& weights) {
  if (image.height() != config.input_size || image.width() != config.input_size ||
      image.channels() != 3) {
    throw std::invalid_argument(
        "backbone_forward: expected " + std::to_string(config.input_size) + "x" +
        std::to_string(config.input_size) + "x3 input, got " +
        std::to_string(image.height()) + "x" + std::to_string(image.width()) + "x" +
        std::to_string(image.channels()));
  }
  const auto blocks = unroll_blocks(config);
  if (weights.blocks.size() != blocks.size()) {
    throw std::invalid_argument("backbone_forward: " +
                                std::to_string(weights.blocks.size()) +
                                " block weights for " + std::to_string(blocks.size()) +
                                " blocks");
  }
  expect_conv(weights.stem, "stem.conv", 3, 3, config.stem_channels, 2);
  Tensor x = conv2d(image, weights.stem);
  relu6_inplace(x);

  FeatureTaps taps;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    x = inverted_residual(x, blocks[i], weights.blocks[i]);
    const bool last_of_stage =
        i + 1 == blocks.size() || blocks[i + 1].stage != blocks[i].stage;
    if (last_of_stage && blocks[i].stage == config.tap_a_stage) taps.tap_a = x;
  }
  expect_conv(weights.head, "head.conv", 1, config.stages.back().out_channels,
              config.head_channels, 1);
  taps.tap_b = conv2d(x, weights.head);
  relu6_inplace(taps.tap_b);
  return taps;
}

}  // namespace maskdet
