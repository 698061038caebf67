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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maskdet/box.h"
#include "maskdet/dataset.h"
#include "maskdet/rng.h"
#include "maskdet/tensor.h"

namespace maskdet {

// A pixel-space box with its class name and a mixing weight (1 unless the
// box came out of mixup).
struct LabeledBox {
  std::string name;
  Box box;
  double weight = 1.0;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

std::vector<LabeledBox> boxes_from_annotation(const Annotation& a);
// Rounds corners to the nearest integer, clamps them to the image and drops
// boxes that collapse.
Annotation annotation_with_boxes(const Annotation& base, const std::vector<LabeledBox>& boxes);

struct MixupConfig {
  double alpha = 0.4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MixupSample {
  Tensor image;
  std::vector<double> label;  // on the probability simplex
  std::vector<LabeledBox> boxes;
};

// lambda ~ Beta(alpha, alpha) as g1 / (g1 + g2) with g1, g2 ~ Gamma(alpha, 1).
double sample_lambda(Rng& rng, double alpha);

// x = lambda * x_a + (1 - lambda) * x_b, same for the label; boxes are the
// union of both lists with weights scaled by lambda and (1 - lambda).
// The two coefficients always sum to exactly 1, and
// mixup(a, b, l) == mixup(b, a, 1 - l) bit for bit.
MixupSample mixup(const MixupSample& a, const MixupSample& b, double lambda);

struct Augmented {
  Tensor image;
  std::vector<LabeledBox> boxes;
};

// Boxes whose clipped area falls below this share of their unclipped area
// are dropped by translate() and rotate().
inline constexpr double kMinVisibleArea = 0.25;

Augmented flip_horizontal(const Tensor& image, const std::vector<LabeledBox>& boxes);

// Integer pixel shift with zero fill.
Augmented translate(const Tensor& image, const std::vector<LabeledBox>& boxes, int dx, int dy,
                    double min_visible = kMinVisibleArea);

// Counterclockwise (as displayed) rotation about the image center, bilinear
// resampling with zero fill. Each box becomes the axis-aligned hull of its
// rotated corners, clipped to the frame.
Augmented rotate(const Tensor& image, const std::vector<LabeledBox>& boxes, double degrees,
                 double min_visible = kMinVisibleArea);

// Default magnitudes for randomized geometric augmentation.
struct GeometricRanges {
  double max_rotation_degrees = 15.0;
  double max_translation_fraction = 0.1;
};

}  // namespace maskdet
