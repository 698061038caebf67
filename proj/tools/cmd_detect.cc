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

#include <cstdio>
#include <memory>

#include "commands.h"
#include "maskdet/dataset.h"
#include "maskdet/image_io.h"
#include "maskdet/render.h"
#include "json.hpp"

namespace maskdet::cli {
namespace {

struct DetectOptions {
  std::string weights;
  std::string input;
  std::string output;
  std::string annotate;
  std::string label_map;
  PostprocessConfig config;
  bool strict = false;
};

std::string detection_line(const std::string& image_id, const Detection& d) {
  nlohmann::ordered_json j;
  j["image"] = image_id;
  j["class"] = d.class_name;
  j["score"] = d.score;
  j["bbox"] = {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max};
  return j.dump();
}

void run_detect(const DetectOptions& o) {
  check_postprocess(o.config);
  std::vector<std::string> names = default_class_names();
  if (!o.label_map.empty()) names = load_label_map(o.label_map).class_names();
  const SsdModel model = load_model(o.weights);
  if (model.config().head.num_classes + 1 != static_cast<int>(names.size())) {
    throw UsageError("label map has " + std::to_string(names.size() - 1) +
                     " classes, the model predicts " +
                     std::to_string(model.config().head.num_classes));
  }

  std::string out;
  std::size_t processed = 0, skipped = 0, total = 0;
  for (const auto& frame : list_frames(o.input)) {
    Image image;
    try {
      image = read_image(frame.path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "skipping %s: %s\n", frame.path.string().c_str(), e.what());
      ++skipped;
      continue;
    }
    const auto dets = detect(to_tensor(image), model, o.config, names);
    for (const auto& d : dets) out += detection_line(frame.id, d) + "\n";
    total += dets.size();
    ++processed;
    if (!o.annotate.empty()) {
      std::filesystem::create_directories(o.annotate);
      write_ppm(render_annotations(image, dets),
                std::filesystem::path(o.annotate) / (frame.id + ".ppm"));
    }
  }
  write_text(o.output, out);
  std::fprintf(stderr, "%zu frames, %zu detections, %zu skipped\n", processed, total, skipped);
  if (o.strict && skipped > 0) throw RunFailed(std::to_string(skipped) + " frames could not be read");
}

}  // namespace

void add_detect(CLI::App& app) {
  auto o = std::make_shared<DetectOptions>();
  auto* cmd = app.add_subcommand("detect", "Detect masks in a directory of frames");
  cmd->add_option("--weights", o->weights, "Weights container")->required()->check(CLI::ExistingFile);
  cmd->add_option("--input", o->input, "Directory of .ppm/.png frames")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--output", o->output, "Detections JSONL")->required();
  cmd->add_option("--annotate", o->annotate, "Write annotated frames here");
  cmd->add_option("--label-map", o->label_map, "Label map (pbtxt)")->check(CLI::ExistingFile);
  add_postprocess_flags(cmd, o->config);
  cmd->add_flag("--strict", o->strict, "Fail when a frame cannot be decoded");
  cmd->callback([o] { run_detect(*o); });
}

}  // namespace maskdet::cli
