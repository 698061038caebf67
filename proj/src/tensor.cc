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

#include "maskdet/tensor.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "maskdet/parallel.h"

namespace maskdet {
namespace {

std::string dims(int h, int w, int c) {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

void check_positive(int h, int w, int c) {
  if (h <= 0 || w <= 0 || c <= 0) {
    throw std::invalid_argument("tensor dims must be positive, got " +
                                dims(h, w, c));
  }
}

}  // namespace

Tensor::Tensor(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_positive(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Tensor::Tensor(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels),
      data_(std::move(data)) {
  check_positive(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw std::invalid_argument("tensor data length " +
                                std::to_string(data_.size()) +
                                " does not match " + dims(height, width, channels));
  }
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

void ConvParams::validate() const {
  if (kernel_h < 1 || kernel_w < 1 || in_channels < 1 || out_channels < 1) {
    throw std::invalid_argument("conv params: dims must be positive");
  }
  if (stride < 1 || padding < 0) {
    throw std::invalid_argument("conv params: stride must be >= 1 and padding >= 0");
  }
  std::size_t expected = static_cast<std::size_t>(kernel_h) * kernel_w *
                         in_channels * out_channels;
  if (weight.size() != expected) {
    throw std::invalid_argument("conv params: weight length " +
                                std::to_string(weight.size()) + ", expected " +
                                std::to_string(expected));
  }
  if (bias.size() != static_cast<std::size_t>(out_channels)) {
    throw std::invalid_argument("conv params: bias length " +
                                std::to_string(bias.size()) + ", expected " +
                                std::to_string(out_channels));
  }
}

void DepthwiseParams::validate() const {
  if (kernel_h < 1 || kernel_w < 1 || channels < 1) {
    throw std::invalid_argument("depthwise params: dims must be positive");
  }
  if (stride < 1 || padding < 0) {
    throw std::invalid_argument(
        "depthwise params: stride must be >= 1 and padding >= 0");
  }
  std::size_t expected = static_cast<std::size_t>(kernel_h) * kernel_w * channels;
  if (weight.size() != expected) {
    throw std::invalid_argument("depthwise params: weight length " +
                                std::to_string(weight.size()) + ", expected " +
                                std::to_string(expected));
  }
  if (bias.size() != static_cast<std::size_t>(channels)) {
    throw std::invalid_argument("depthwise params: bias length " +
                                std::to_string(bias.size()) + ", expected " +
                                std::to_string(channels));
  }
}

void BatchNormParams::validate() const {
  std::size_t n = gamma.size();
  if (beta.size() != n || mean.size() != n || variance.size() != n) {
    throw std::invalid_argument("batchnorm params: array lengths differ");
  }
  if (!(epsilon > 0.0f)) {
    throw std::invalid_argument("batchnorm params: epsilon must be positive");
  }
  for (float v : variance) {
    if (!(v >= 0.0f)) {
      throw std::invalid_argument("batchnorm params: negative variance");
    }
  }
}

int conv_output_dim(int in, int kernel, int stride, int padding) {
  int span = in + 2 * padding - kernel;
  if (span < 0 || stride < 1) {
    throw std::invalid_argument("convolution yields non-positive output dim (in=" +
                                std::to_string(in) + ", k=" +
                                std::to_string(kernel) + ", s=" +
                                std::to_string(stride) + ", p=" +
                                std::to_string(padding) + ")");
  }
  return span / stride + 1;
}

// Per output element the accumulation order is fixed: bias, then taps in
// (ky, kx, ic) order. Vectorization runs across output channels only, so
// results are bit-identical for any worker count.
Tensor conv2d(const Tensor& input, const ConvParams& p) {
  p.validate();
  if (input.channels() != p.in_channels) {
    throw std::invalid_argument("conv2d: input has " +
                                std::to_string(input.channels()) +
                                " channels, kernel expects " +
                                std::to_string(p.in_channels));
  }
  const int out_h = conv_output_dim(input.height(), p.kernel_h, p.stride, p.padding);
  const int out_w = conv_output_dim(input.width(), p.kernel_w, p.stride, p.padding);
  Tensor output(out_h, out_w, p.out_channels);

  const int in_h = input.height();
  const int in_w = input.width();
  const int in_c = p.in_channels;
  const int out_c = p.out_channels;
  const float* src = input.data().data();
  float* dst = output.data().data();
  const float* weight = p.weight.data();
  const float* bias = p.bias.data();

  parallel_for(0, out_h, [&](int row_begin, int row_end) {
    for (int oy = row_begin; oy < row_end; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        float* acc = dst + (static_cast<std::size_t>(oy) * out_w + ox) * out_c;
        std::copy(bias, bias + out_c, acc);
        for (int ky = 0; ky < p.kernel_h; ++ky) {
          const int iy = oy * p.stride - p.padding + ky;
          if (iy < 0 || iy >= in_h) continue;
          for (int kx = 0; kx < p.kernel_w; ++kx) {
            const int ix = ox * p.stride - p.padding + kx;
            if (ix < 0 || ix >= in_w) continue;
            const float* in = src + (static_cast<std::size_t>(iy) * in_w + ix) * in_c;
            const float* w = weight + (static_cast<std::size_t>(ky) * p.kernel_w + kx) *
                                          in_c * out_c;
            for (int ic = 0; ic < in_c; ++ic) {
              const float v = in[ic];
              const float* wrow = w + static_cast<std::size_t>(ic) * out_c;
              for (int oc = 0; oc < out_c; ++oc) acc[oc] += v * wrow[oc];
            }
          }
        }
      }
    }
  });
  return output;
}

Tensor depthwise_conv2d(const Tensor& input, const DepthwiseParams& p) {
  p.validate();
  if (input.channels() != p.channels) {
    throw std::invalid_argument("depthwise_conv2d: input has " +
                                std::to_string(input.channels()) +
                                " channels, kernel expects " +
                                std::to_string(p.channels));
  }
  const int out_h = conv_output_dim(input.height(), p.kernel_h, p.stride, p.padding);
  const int out_w = conv_output_dim(input.width(), p.kernel_w, p.stride, p.padding);
  const int c = p.channels;
  Tensor output(out_h, out_w, c);

  const int in_h = input.height();
  const int in_w = input.width();
  const float* src = input.data().data();
  float* dst = output.data().data();

  parallel_for(0, out_h, [&](int row_begin, int row_end) {
    for (int oy = row_begin; oy < row_end; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        float* acc = dst + (static_cast<std::size_t>(oy) * out_w + ox) * c;
        std::copy(p.bias.begin(), p.bias.end(), acc);
        for (int ky = 0; ky < p.kernel_h; ++ky) {
          const int iy = oy * p.stride - p.padding + ky;
          if (iy < 0 || iy >= in_h) continue;
          for (int kx = 0; kx < p.kernel_w; ++kx) {
            const int ix = ox * p.stride - p.padding + kx;
            if (ix < 0 || ix >= in_w) continue;
            const float* in = src + (static_cast<std::size_t>(iy) * in_w + ix) * c;
            const float* w =
                p.weight.data() + (static_cast<std::size_t>(ky) * p.kernel_w + kx) * c;
            for (int ch = 0; ch < c; ++ch) acc[ch] += in[ch] * w[ch];
          }
        }
      }
    }
  });
  return output;
}

Tensor pointwise_conv(const Tensor& input, std::span<const float> weight,
                      std::span<const float> bias, int out_channels) {
  ConvParams p;
  p.kernel_h = 1;
  p.kernel_w = 1;
  p.in_channels = input.channels();
  p.out_channels = out_channels;
  p.weight.assign(weight.begin(), weight.end());
  p.bias.assign(bias.begin(), bias.end());
  return conv2d(input, p);
}

void relu6_inplace(Tensor& t) {
  for (float& v : t.data()) v = std::min(std::max(v, 0.0f), 6.0f);
}

Tensor relu6(Tensor input) {
  relu6_inplace(input);
  return input;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("add: shape mismatch " +
                                dims(a.height(), a.width(), a.channels()) + " vs " +
                                dims(b.height(), b.width(), b.channels()));
  }
  Tensor out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

namespace {

std::vector<double> bn_scale(const BatchNormParams& bn) {
  std::vector<double> scale(bn.gamma.size());
  for (std::size_t i = 0; i < scale.size(); ++i) {
    scale[i] = static_cast<double>(bn.gamma[i]) /
               std::sqrt(static_cast<double>(bn.variance[i]) + bn.epsilon);
  }
  return scale;
}

void fold_bias(std::vector<float>& bias, const BatchNormParams& bn,
               const std::vector<double>& scale) {
  for (std::size_t i = 0; i < bias.size(); ++i) {
    bias[i] = static_cast<float>(bn.beta[i] +
                                 (static_cast<double>(bias[i]) - bn.mean[i]) * scale[i]);
  }
}

}  // namespace

ConvParams fold_batchnorm(const ConvParams& conv, const BatchNormParams& bn) {
  conv.validate();
  bn.validate();
  if (bn.gamma.size() != static_cast<std::size_t>(conv.out_channels)) {
    throw std::invalid_argument("fold_batchnorm: " + std::to_string(bn.gamma.size()) +
                                " bn channels for a conv with " +
                                std::to_string(conv.out_channels) + " outputs");
  }
  auto scale = bn_scale(bn);
  ConvParams out = conv;
  for (std::size_t i = 0; i < out.weight.size(); ++i) {
    out.weight[i] = static_cast<float>(out.weight[i] * scale[i % conv.out_channels]);
  }
  fold_bias(out.bias, bn, scale);
  return out;
}

DepthwiseParams fold_batchnorm(const DepthwiseParams& conv,
                               const BatchNormParams& bn) {
  conv.validate();
  bn.validate();
  if (bn.gamma.size() != static_cast<std::size_t>(conv.channels)) {
    throw std::invalid_argument("fold_batchnorm: " + std::to_string(bn.gamma.size()) +
                                " bn channels for a depthwise conv with " +
                                std::to_string(conv.channels) + " channels");
  }
  auto scale = bn_scale(bn);
  DepthwiseParams out = conv;
  for (std::size_t i = 0; i < out.weight.size(); ++i) {
    out.weight[i] = static_cast<float>(out.weight[i] * scale[i % conv.channels]);
  }
  fold_bias(out.bias, bn, scale);
  return out;
}

Tensor resize_bilinear(const Tensor& image, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) {
    throw std::invalid_argument("resize_bilinear: output dims must be positive");
  }
  if (image.empty()) throw std::invalid_argument("resize_bilinear: empty image");
  const int in_h = image.height();
  const int in_w = image.width();
  const int c = image.channels();

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int out, int in) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / out;
    for (int d = 0; d < out; ++d) {
      double s = (d + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      int lo = static_cast<int>(std::floor(s));
      t[d] = {lo, std::min(lo + 1, in - 1), s - lo};
    }
    return t;
  };
  const auto ys = taps(out_h, in_h);
  const auto xs = taps(out_w, in_w);

  Tensor out(out_h, out_w, c);
  parallel_for(0, out_h, [&](int row_begin, int row_end) {
    for (int y = row_begin; y < row_end; ++y) {
      const Tap& ty = ys[y];
      for (int x = 0; x < out_w; ++x) {
        const Tap& tx = xs[x];
        for (int ch = 0; ch < c; ++ch) {
          double top = (1.0 - tx.frac) * image.at(ty.lo, tx.lo, ch) +
                       tx.frac * image.at(ty.lo, tx.hi, ch);
          double bottom = (1.0 - tx.frac) * image.at(ty.hi, tx.lo, ch) +
                          tx.frac * image.at(ty.hi, tx.hi, ch);
          out.at(y, x, ch) = static_cast<float>((1.0 - ty.frac) * top + ty.frac * bottom);
        }
      }
    }
  });
  return out;
}

Tensor normalize_input(const Tensor& image) {
  Tensor out = image;
  for (float& v : out.data()) v = v / 127.5f - 1.0f;
  return out;
}

}  // namespace maskdet
