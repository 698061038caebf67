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

#include <string>
#include <vector>

#include "json.hpp"
#include "maskdet/model.h"
#include "maskdet/postprocess.h"
#include "maskdet/tensor.h"

namespace maskdet {

struct StageStats {
  double mean_ms = 0;
  double median_ms = 0;
  double p95_ms = 0;  // nearest rank
};

StageStats summarize(std::vector<double> samples_ms);

struct BenchReport {
  std::size_t frames = 0;  // timed detect() calls
  int threads = 1;
  StageStats preprocess, forward, postprocess, total;
  double total_seconds = 0;  // wall time of the timed section
  double fps = 0;            // frames / total_seconds
};

struct BenchOptions {
  int warmup = 1;
  int repeat = 5;   // timed passes over all frames
  int threads = 0;  // 0: num_threads()
};

// Runs `warmup` untimed and `repeat` timed passes of detect() over the
// frames. With more than one thread, whole frames are spread over workers
// (each running its kernels serially). Per-frame stage timestamps are
// chained, so in a single worker the frame latencies add up exactly to the
// wall time. `outputs` receives the detections of the last timed pass.
BenchReport run_bench(const SsdModel& model, const std::vector<Tensor>& frames,
                      const PostprocessConfig& config, const BenchOptions& options,
                      std::vector<std::vector<Detection>>* outputs = nullptr);

nlohmann::json to_json(const BenchReport& report);
std::string format_table(const BenchReport& report);

}  // namespace maskdet
