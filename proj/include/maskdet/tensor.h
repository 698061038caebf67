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
#include <span>
#include <vector>

namespace maskdet {

// Dense single-image feature map, HWC row-major:
// index = (y * width + x) * channels + c.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int height, int width, int channels, float fill = 0.0f);
  Tensor(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  const std::vector<float>& values() const { return data_; }

  bool same_shape(const Tensor& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Convolution weights in [kH, kW, inC, outC] order.
struct ConvParams {
  int kernel_h = 1;
  int kernel_w = 1;
  int in_channels = 1;
  int out_channels = 1;
  std::vector<float> weight;
  std::vector<float> bias;
  int stride = 1;
  int padding = 0;

  float& w(int kh, int kw, int ic, int oc) {
    return weight[((static_cast<std::size_t>(kh) * kernel_w + kw) *
                       in_channels + ic) * out_channels + oc];
  }
  float w(int kh, int kw, int ic, int oc) const {
    return weight[((static_cast<std::size_t>(kh) * kernel_w + kw) *
                       in_channels + ic) * out_channels + oc];
  }

  // Throws std::invalid_argument when the arrays disagree with the dims.
  void validate() const;
  std::size_t parameter_count() const { return weight.size() + bias.size(); }
};

// Per-channel spatial kernel in [kH, kW, C] order.
struct DepthwiseParams {
  int kernel_h = 3;
  int kernel_w = 3;
  int channels = 1;
  std::vector<float> weight;
  std::vector<float> bias;
  int stride = 1;
  int padding = 1;

  void validate() const;
  std::size_t parameter_count() const { return weight.size() + bias.size(); }
};

struct BatchNormParams {
  std::vector<float> gamma;
  std::vector<float> beta;
  std::vector<float> mean;
  std::vector<float> variance;
  float epsilon = 1e-3f;

  void validate() const;
};

// floor((in + 2 * padding - kernel) / stride) + 1; throws if not positive.
int conv_output_dim(int in, int kernel, int stride, int padding);

Tensor conv2d(const Tensor& input, const ConvParams& params);

Tensor depthwise_conv2d(const Tensor& input, const DepthwiseParams& params);

// 1x1, stride 1, no padding. Weight layout [1, 1, inC, outC].
Tensor pointwise_conv(const Tensor& input, std::span<const float> weight,
                      std::span<const float> bias, int out_channels);

Tensor relu6(Tensor input);
void relu6_inplace(Tensor& t);

// Elementwise a + b; shapes must match.
Tensor add(const Tensor& a, const Tensor& b);

// Folds inference-mode batch normalization into the preceding convolution:
//   W' = W * gamma / sqrt(var + eps),  b' = beta + (b - mean) * gamma / sqrt(var + eps)
ConvParams fold_batchnorm(const ConvParams& conv, const BatchNormParams& bn);
DepthwiseParams fold_batchnorm(const DepthwiseParams& conv,
                               const BatchNormParams& bn);

// Bilinear resampling with half-pixel centers:
//   src = (dst + 0.5) * (in / out) - 0.5, clamped to the valid range.
Tensor resize_bilinear(const Tensor& image, int out_h, int out_w);

// Maps byte intensities [0, 255] to [-1, 1] via x / 127.5 - 1.
Tensor normalize_input(const Tensor& image);

}  // namespace maskdet
