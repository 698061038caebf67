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

#include <stdexcept>
#include <string>

#include "CLI11.hpp"

namespace maskdet::cli {

// Bad flags or unusable inputs; exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Signals a completed run that must still exit nonzero (status 1).
class RunFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_detect(CLI::App& app);
void add_evaluate(CLI::App& app);
void add_dataset(CLI::App& app);
void add_augment(CLI::App& app);
void add_bench(CLI::App& app);
void add_weights(CLI::App& app);

}  // namespace maskdet::cli

#include <filesystem>
#include <fstream>

#include "maskdet/model.h"
#include "maskdet/postprocess.h"
#include "maskdet/weights.h"

namespace maskdet::cli {

inline SsdModel load_model(const std::string& path) {
  return SsdModel::build(load_weights(path));
}

inline void check_postprocess(const PostprocessConfig& config) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void add_postprocess_flags(CLI::App* cmd, PostprocessConfig& config) {
  cmd->add_option("--score-threshold", config.score_threshold, "Minimum class probability")
      ->capture_default_str();
  cmd->add_option("--nms-threshold", config.nms_iou_threshold, "IoU above which NMS suppresses")
      ->capture_default_str();
  cmd->add_option("--max-detections", config.max_detections, "Detections kept per frame")
      ->capture_default_str();
}

}  // namespace maskdet::cli
