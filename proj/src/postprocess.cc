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

#include "maskdet/postprocess.h"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace maskdet {

void PostprocessConfig::validate() const {
  if (!(score_threshold > 0.0 && score_threshold <= 1.0)) {
    throw std::invalid_argument("score threshold must be in (0, 1]");
  }
  if (!(nms_iou_threshold > 0.0 && nms_iou_threshold <= 1.0)) {
    throw std::invalid_argument("NMS IoU threshold must be in (0, 1]");
  }
  if (max_detections < 0) throw std::invalid_argument("max detections must be >= 0");
}

std::vector<std::string> default_class_names() { return {"background", "Mask", "NoMask"}; }

std::vector<Candidate> filter_by_score(std::span<const DecodedBox> boxes, double threshold) {
  std::vector<Candidate> out;
  if (boxes.empty()) return out;
  const int classes = static_cast<int>(boxes.front().probs.size());
  for (int c = 1; c < classes; ++c) {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const DecodedBox& b = boxes[i];
      const float p = b.probs[c];
      if (p >= threshold) {
        const double hw = static_cast<double>(b.w) / 2;
        const double hh = static_cast<double>(b.h) / 2;
        auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
        const Box box{unit(b.cx - hw), unit(b.cy - hh), unit(b.cx + hw), unit(b.cy + hh)};
        if (box.valid()) out.push_back({c, p, box, static_cast<int>(i)});
      }
    }
  }
  return out;
}

namespace {

bool by_score(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.index < b.index;
}

}  // namespace

std::vector<Candidate> nms_per_class(std::vector<Candidate> candidates, double iou_threshold) {
  std::sort(candidates.begin(), candidates.end(), by_score);
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (iou(c.box, k.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(c);
  }
  return kept;
}

std::vector<Detection> postprocess(std::span<const DecodedBox> boxes,
                                   const PostprocessConfig& config, int frame_width,
                                   int frame_height,
                                   const std::vector<std::string>& class_names) {
  config.validate();
  auto candidates = filter_by_score(boxes, config.score_threshold);
  std::vector<Candidate> merged;
  auto begin = candidates.begin();
  while (begin != candidates.end()) {
    auto end = std::find_if(begin, candidates.end(),
                            [&](const Candidate& c) { return c.class_id != begin->class_id; });
    auto survivors = nms_per_class(std::vector<Candidate>(begin, end), config.nms_iou_threshold);
    merged.insert(merged.end(), survivors.begin(), survivors.end());
    begin = end;
  }
  std::stable_sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return a.index < b.index;
  });

  std::vector<Detection> out;
  for (const auto& c : merged) {
    if (static_cast<int>(out.size()) >= config.max_detections) break;
    Detection d;
    d.class_id = c.class_id;
    d.class_name = c.class_id < static_cast<int>(class_names.size())
                       ? class_names[c.class_id]
                       : std::to_string(c.class_id);
    d.score = c.score;
    d.bbox = {c.box.x_min * frame_width, c.box.y_min * frame_height,
              c.box.x_max * frame_width, c.box.y_max * frame_height};
    if (!d.bbox.valid()) continue;  // collapsed by clipping
    out.push_back(std::move(d));
  }
  return out;
}

Tensor preprocess(const Tensor& frame, int input_size) {
  if (frame.channels() != 3) {
    throw std::invalid_argument("frame must have 3 channels, got " +
                                std::to_string(frame.channels()));
  }
  return resize_bilinear(normalize_input(frame), input_size, input_size);
}

std::vector<Detection> detect(const Tensor& frame, const SsdModel& model,
                              const PostprocessConfig& config,
                              const std::vector<std::string>& class_names,
                              DetectTimings* timings) {
  config.validate();
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  const auto t0 = clock::now();
  Tensor input = preprocess(frame, model.input_size());
  const auto t1 = clock::now();
  RawPredictions raw = model.forward(input);
  const auto t2 = clock::now();
  auto decoded = decode_boxes(raw, model.anchors(), model.config().head.anchors.variances);
  auto dets = postprocess(decoded, config, frame.width(), frame.height(), class_names);
  const auto t3 = clock::now();
  if (timings) *timings = {ms(t0, t1), ms(t1, t2), ms(t2, t3)};
  return dets;
}

}  // namespace maskdet
