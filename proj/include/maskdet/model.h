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

#include <cstddef>
#include <vector>

#include "maskdet/backbone.h"
#include "maskdet/layer_spec.h"
#include "maskdet/ssd_head.h"
#include "maskdet/tensor.h"

namespace maskdet {

class WeightStore;

struct ModelConfig {
  BackboneConfig backbone;
  HeadConfig head;
};

// Backbone, extra blocks, then predictors, in execution order.
std::vector<LayerSpec> architecture_layers(const ModelConfig& config);

// Weights plus biases of the backbone convolutions (BN folded).
std::size_t backbone_parameter_count(const BackboneConfig& config);

struct ForwardTrace {
  FeatureTaps taps;
  std::vector<Tensor> extras;
  RawPredictions predictions;
};

// SSD-MobileNetV2 with inference-ready (BN-folded) weights. Immutable after
// construction; forward() may be called concurrently.
class SsdModel {
 public:
  // Validates the store against the architecture and folds any separate
  // batch-norm entries. Throws std::invalid_argument listing every problem.
  static SsdModel build(const WeightStore& store, const ModelConfig& config = {});
  // All weights and biases zero.
  static SsdModel zeros(const ModelConfig& config = {});

  // Input must be normalized and input_size x input_size x 3.
  RawPredictions forward(const Tensor& input) const;
  ForwardTrace forward_trace(const Tensor& input) const;

  const ModelConfig& config() const { return config_; }
  const std::vector<Anchor>& anchors() const { return anchors_; }
  int input_size() const { return config_.backbone.input_size; }

 private:
  SsdModel(const ModelConfig& config, BackboneWeights backbone,
           std::vector<ExtraBlockWeights> extras, std::vector<PredictorWeights> predictors);

  ModelConfig config_;
  BackboneWeights backbone_;
  std::vector<ExtraBlockWeights> extras_;
  std::vector<PredictorWeights> predictors_;
  std::vector<Anchor> anchors_;
};

}  // namespace maskdet
