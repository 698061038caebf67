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

#include "maskdet/model.h"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "maskdet/check.h"
#include "maskdet/weights.h"

namespace maskdet {

std::vector<LayerSpec> architecture_layers(const ModelConfig& config) {
  auto layers = backbone_layers(config.backbone);
  for (auto& l : extra_layers(config.backbone, config.head)) layers.push_back(std::move(l));
  for (auto& l : predictor_layers(config.backbone, config.head)) layers.push_back(std::move(l));
  return layers;
}

std::size_t backbone_parameter_count(const BackboneConfig& config) {
  std::size_t n = 0;
  for (const auto& l : backbone_layers(config)) n += l.parameter_count();
  return n;
}

namespace {

// Produces the conv or depthwise params for one layer, folding separate
// batch-norm entries when present.
class LayerLoader {
 public:
  explicit LayerLoader(const WeightStore* store) : store_(store) {}

  ConvParams conv(const LayerSpec& spec) const {
    ConvParams p;
    p.kernel_h = p.kernel_w = spec.kernel;
    p.in_channels = spec.in_channels;
    p.out_channels = spec.out_channels;
    p.stride = spec.stride;
    p.padding = spec.padding;
    load(spec, p.weight, p.bias);
    if (auto bn = batchnorm(spec)) return fold_batchnorm(p, *bn);
    return p;
  }

  DepthwiseParams depthwise(const LayerSpec& spec) const {
    DepthwiseParams p;
    p.kernel_h = p.kernel_w = spec.kernel;
    p.channels = spec.in_channels;
    p.stride = spec.stride;
    p.padding = spec.padding;
    load(spec, p.weight, p.bias);
    if (auto bn = batchnorm(spec)) return fold_batchnorm(p, *bn);
    return p;
  }

 private:
  void load(const LayerSpec& spec, std::vector<float>& weight,
            std::vector<float>& bias) const {
    std::size_t wn = 1;
    for (int d : spec.weight_shape()) wn *= static_cast<std::size_t>(d);
    if (!store_) {
      weight.assign(wn, 0.0f);
      bias.assign(spec.out_channels, 0.0f);
      return;
    }
    auto w = store_->values(spec.name + ".weight");
    weight.assign(w.begin(), w.end());
    const std::string b = spec.name + ".bias";
    if (store_->contains(b)) {
      auto v = store_->values(b);
      bias.assign(v.begin(), v.end());
    } else {
      bias.assign(spec.out_channels, 0.0f);
    }
  }

  std::optional<BatchNormParams> batchnorm(const LayerSpec& spec) const {
    if (!store_ || !store_->contains(spec.name + ".bn.gamma")) return std::nullopt;
    auto get = [&](const char* f) {
      auto v = store_->values(spec.name + ".bn." + f);
      return std::vector<float>(v.begin(), v.end());
    };
    BatchNormParams bn;
    bn.gamma = get("gamma");
    bn.beta = get("beta");
    bn.mean = get("mean");
    bn.variance = get("variance");
    if (store_->contains(spec.name + ".bn.epsilon")) bn.epsilon = get("epsilon").at(0);
    return bn;
  }

  const WeightStore* store_;
};

struct Parts {
  BackboneWeights backbone;
  std::vector<ExtraBlockWeights> extras;
  std::vector<PredictorWeights> predictors;
};

Parts assemble(const LayerLoader& loader, const ModelConfig& config) {
  const auto layers = architecture_layers(config);
  std::map<std::string, const LayerSpec*> by_name;
  for (const auto& l : layers) by_name[l.name] = &l;
  auto spec = [&](const std::string& name) -> const LayerSpec& {
    auto it = by_name.find(name);
    MASKDET_CHECK(it != by_name.end(), name.c_str());
    return *it->second;
  };

  Parts parts;
  parts.backbone.stem = loader.conv(spec("stem.conv"));
  for (const auto& b : unroll_blocks(config.backbone)) {
    InvertedResidualWeights w;
    if (b.expansion != 1) w.expand = loader.conv(spec(b.name + ".expand"));
    w.depthwise = loader.depthwise(spec(b.name + ".depthwise"));
    w.project = loader.conv(spec(b.name + ".project"));
    parts.backbone.blocks.push_back(std::move(w));
  }
  parts.backbone.head = loader.conv(spec("head.conv"));
  for (std::size_t k = 1; k <= config.head.extra_channels.size(); ++k) {
    const std::string p = "extra" + std::to_string(k);
    parts.extras.push_back({loader.conv(spec(p + ".squeeze")), loader.conv(spec(p + ".conv"))});
  }
  for (std::size_t k = 1; k <= config.head.anchors.feature_map_sizes.size(); ++k) {
    const std::string p = "predictor" + std::to_string(k);
    parts.predictors.push_back(
        {loader.conv(spec(p + ".class")), loader.conv(spec(p + ".box"))});
  }
  return parts;
}

}  // namespace

SsdModel::SsdModel(const ModelConfig& config, BackboneWeights backbone,
                   std::vector<ExtraBlockWeights> extras,
                   std::vector<PredictorWeights> predictors)
    : config_(config),
      backbone_(std::move(backbone)),
      extras_(std::move(extras)),
      predictors_(std::move(predictors)),
      anchors_(generate_anchors(config.head.anchors)) {}

SsdModel SsdModel::build(const WeightStore& store, const ModelConfig& config) {
  auto report = validate_against_architecture(store, config);
  if (!report.ok()) {
    std::string msg = "weights do not match the architecture:";
    for (const auto& e : report.errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  Parts p = assemble(LayerLoader(&store), config);
  return SsdModel(config, std::move(p.backbone), std::move(p.extras), std::move(p.predictors));
}

SsdModel SsdModel::zeros(const ModelConfig& config) {
  Parts p = assemble(LayerLoader(nullptr), config);
  return SsdModel(config, std::move(p.backbone), std::move(p.extras), std::move(p.predictors));
}

ForwardTrace SsdModel::forward_trace(const Tensor& input) const {
  ForwardTrace t;
  t.taps = backbone_forward(input, config_.backbone, backbone_);
  t.extras = extra_feature_layers(t.taps.tap_b, extras_);
  t.predictions = head_forward(t.taps, t.extras, predictors_, config_.head);
  MASKDET_CHECK(static_cast<std::size_t>(t.predictions.num_anchors) == anchors_.size(),
                "prediction rows != anchor count");
  return t;
}

RawPredictions SsdModel::forward(const Tensor& input) const {
  return forward_trace(input).predictions;
}

}  // namespace maskdet
