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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskdet/box.h"
#include "maskdet/dataset.h"

namespace maskdet {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// A zero denominator yields 0.
double accuracy(const ConfusionCounts& c);   // (TP + TN) / (TP + FP + FN + TN)
double precision(const ConfusionCounts& c);  // TP / (TP + FP)
double recall(const ConfusionCounts& c);     // TP / (TP + FN)

struct GroundTruth {
  std::string image_id;
  int class_id = 0;
  Box box;
};

struct ScoredDetection {
  std::string image_id;
  int class_id = 0;
  double score = 0;
  Box box;
};

struct MatchResult {
  std::vector<int> gt_of_detection;  // per input detection; -1 when unmatched
  ConfusionCounts counts;            // TN is always 0
};

// Single image. Detections are visited by descending score (input order
// breaks ties); each takes the unmatched same-class ground truth with the
// highest IoU >= iou_threshold (lower index breaks ties).
MatchResult match_detections(std::span<const ScoredDetection> dets,
                             std::span<const GroundTruth> gts, double iou_threshold);

struct RankedMatch {
  double score = 0;
  bool true_positive = false;
};

// 101-point interpolated AP: the mean over r in {0, 0.01, ..., 1} of the
// highest precision reached at recall >= r (0 where recall r is never
// reached). Returns 0 when num_ground_truth is 0.
double average_precision(std::vector<RankedMatch> matches, std::size_t num_ground_truth);

struct EvalReport {
  std::vector<double> iou_thresholds;                    // 0.50, 0.55, ..., 0.95
  std::map<std::string, std::vector<double>> ap_per_class;  // per threshold
  double map_coco = 0;  // mean over classes with ground truth and thresholds
  double ap50 = 0;
  double ap75 = 0;
  double ar_max100 = 0;
  // Operating point: IoU 0.5, every supplied detection.
  ConfusionCounts counts;
  double precision = 0, recall = 0, accuracy = 0;
};

std::vector<double> coco_iou_thresholds();

EvalReport coco_map(std::span<const ScoredDetection> dets, std::span<const GroundTruth> gts,
                    const LabelMap& labels, std::size_t max_detections_per_image = 100);

nlohmann::json to_json(const EvalReport& report);

}  // namespace maskdet
