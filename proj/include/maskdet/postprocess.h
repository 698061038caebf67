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

#include <span>
#include <string>
#include <vector>

#include "maskdet/box.h"
#include "maskdet/model.h"
#include "maskdet/ssd_head.h"
#include "maskdet/tensor.h"

namespace maskdet {

struct PostprocessConfig {
  double score_threshold = 0.5;
  double nms_iou_threshold = 0.45;
  int max_detections = 100;

  // Thresholds must lie in (0, 1], max_detections >= 0.
  void validate() const;
};

// A per-class candidate in normalized corner coordinates. `index` is the
// anchor index and breaks score ties.
struct Candidate {
  int class_id = 0;
  float score = 0;
  Box box;
  int index = 0;
};

struct Detection {
  int class_id = 0;
  std::string class_name;
  double score = 0;
  Box bbox;  // pixels of the original frame
};

// Index = class id; index 0 is background.
std::vector<std::string> default_class_names();

// For each foreground class keeps boxes with probability >= threshold,
// clipped to [0, 1]; boxes that collapse are dropped.
// Output is grouped by class, anchor order within a class.
std::vector<Candidate> filter_by_score(std::span<const DecodedBox> boxes, double threshold);

// Greedy NMS over one class: highest score first (smaller index wins ties);
// boxes with IoU > iou_threshold against a kept box are dropped.
std::vector<Candidate> nms_per_class(std::vector<Candidate> candidates, double iou_threshold);

// Filtering, per-class NMS, merge, top-k and scaling to frame pixels.
std::vector<Detection> postprocess(std::span<const DecodedBox> boxes,
                                   const PostprocessConfig& config, int frame_width,
                                   int frame_height,
                                   const std::vector<std::string>& class_names);

// Frame values are byte intensities (0..255), any size, 3 channels.
Tensor preprocess(const Tensor& frame, int input_size);

struct DetectTimings {
  double preprocess_ms = 0;
  double forward_ms = 0;
  double postprocess_ms = 0;
};

std::vector<Detection> detect(const Tensor& frame, const SsdModel& model,
                              const PostprocessConfig& config,
                              const std::vector<std::string>& class_names = default_class_names(),
                              DetectTimings* timings = nullptr);

}  // namespace maskdet
