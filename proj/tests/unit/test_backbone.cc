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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "maskdet/backbone.h"
#include "maskdet/model.h"
#include "maskdet/rng.h"
#include "maskdet/weights.h"
#include "oracles.h"

using namespace maskdet;

TEST_CASE("stage table unrolls to 17 blocks") {
  auto blocks = unroll_blocks(BackboneConfig{});
  REQUIRE(blocks.size() == 17);
  CHECK(blocks.front().name == "stage1.block1");
  CHECK(blocks.front().in_channels == 32);
  CHECK(blocks.front().out_channels == 16);
  CHECK(blocks.back().name == "stage7.block1");
  CHECK(blocks.back().out_channels == 320);
  // Only the first block of a group carries the stride.
  CHECK(blocks[1].stride == 2);
  CHECK(blocks[2].stride == 1);
}

TEST_CASE("residual rule") {
  int with_skip = 0;
  for (const auto& b : unroll_blocks(BackboneConfig{})) {
    CHECK(b.has_residual() == (b.stride == 1 && b.in_channels == b.out_channels));
    with_skip += b.has_residual();
  }
  // 1 + 2 + 3 + 2 + 2 per stage 2..6; stage 1 and 7 change width.
  CHECK(with_skip == 10);
}

TEST_CASE("layer names and shapes") {
  auto layers = backbone_layers(BackboneConfig{});
  CHECK(layers.front().name == "stem.conv");
  CHECK(layers.front().weight_shape() == std::vector<int>{3, 3, 3, 32});
  CHECK(layers.back().name == "head.conv");
  CHECK(layers.back().weight_shape() == std::vector<int>{1, 1, 320, 1280});
  bool saw_expand_in_stage1 = false;
  for (const auto& l : layers) {
    if (l.name == "stage1.block1.expand") saw_expand_in_stage1 = true;
    if (l.name == "stage2.block1.depthwise") {
      CHECK(l.weight_shape() == std::vector<int>{3, 3, 96, 1});
      CHECK(l.stride == 2);
    }
    if (l.name == "stage2.block1.project") CHECK(l.weight_shape() == std::vector<int>{1, 1, 96, 24});
  }
  CHECK_FALSE(saw_expand_in_stage1);
}

TEST_CASE("backbone parameter count is near 2.2M") {
  // Independent sum over the stage table.
  const int table[7][4] = {{1, 16, 1, 1}, {6, 24, 2, 2}, {6, 32, 3, 2}, {6, 64, 4, 2},
                           {6, 96, 3, 1}, {6, 160, 3, 2}, {6, 320, 1, 1}};
  long total = 3 * 3 * 3 * 32 + 32;
  int c = 32;
  for (const auto& row : table) {
    for (int r = 0; r < row[2]; ++r) {
      const int hidden = c * row[0];
      if (row[0] != 1) total += c * hidden + hidden;
      total += 9 * hidden + hidden;
      total += hidden * row[1] + row[1];
      c = row[1];
    }
  }
  total += 320 * 1280 + 1280;
  CHECK(backbone_parameter_count(BackboneConfig{}) == static_cast<std::size_t>(total));
  CHECK(total >= 2.2e6 * 0.95);
  CHECK(total <= 2.2e6 * 1.05);
}

TEST_CASE("inverted residual adds the input only when the rule allows") {
  Rng rng(3);
  BlockSpec spec;
  spec.expansion = 2;
  spec.in_channels = spec.out_channels = 4;
  spec.stride = 1;
  InvertedResidualWeights w;
  w.expand = oracle::random_conv(rng, 1, 4, 8, 1, 0);
  w.depthwise.channels = 8;
  w.depthwise.weight.assign(9 * 8, 0.0f);
  w.depthwise.bias.assign(8, 0.0f);
  w.project = oracle::random_conv(rng, 1, 8, 4, 1, 0);
  std::fill(w.project.bias.begin(), w.project.bias.end(), 0.0f);
  Tensor x = oracle::random_tensor(rng, 5, 5, 4);
  // Zero depthwise kills the branch; the result is the skip path alone.
  CHECK(inverted_residual(x, spec, w) == x);

  spec.stride = 2;
  w.depthwise.stride = 2;
  Tensor y = inverted_residual(x, spec, w);
  CHECK(y.height() == 3);
  for (float v : y.data()) CHECK(v == 0.0f);
}

TEST_CASE("forward shapes and rejected input sizes") {
  SsdModel model = SsdModel::zeros();
  ForwardTrace t = model.forward_trace(Tensor(320, 320, 3));
  CHECK(t.taps.tap_a.height() == 20);
  CHECK(t.taps.tap_a.width() == 20);
  CHECK(t.taps.tap_a.channels() == 96);
  CHECK(t.taps.tap_b.height() == 10);
  CHECK(t.taps.tap_b.channels() == 1280);
  CHECK_THROWS_AS(model.forward(Tensor(300, 300, 3)), std::invalid_argument);
  CHECK_THROWS_AS(model.forward(Tensor(320, 320, 1)), std::invalid_argument);
}

TEST_CASE("random weights produce finite features") {
  ModelConfig config;
  SsdModel model = SsdModel::build(init_random(7, config), config);
  Rng rng(1);
  Tensor img = oracle::random_tensor(rng, 320, 320, 3);
  ForwardTrace t = model.forward_trace(img);
  CHECK(t.taps.tap_a.all_finite());
  CHECK(t.taps.tap_b.all_finite());
  for (float v : t.taps.tap_b.data()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 6.0f);
  }
}
