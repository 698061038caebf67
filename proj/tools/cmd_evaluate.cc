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
#include <fstream>
#include <memory>

#include "commands.h"
#include "maskdet/dataset.h"
#include "maskdet/evaluation.h"
#include "json.hpp"

namespace maskdet::cli {
namespace {

struct EvaluateOptions {
  std::string detections;
  std::string ground_truth;
  std::string label_map;
  std::string report;
  std::size_t max_per_image = 100;
};

std::vector<ScoredDetection> read_detections(const std::string& path, const LabelMap& labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ScoredDetection> dets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      ScoredDetection d;
      d.image_id = j.at("image").get<std::string>();
      const auto name = j.at("class").get<std::string>();
      const auto id = labels.id_of(name);
      if (!id) throw std::invalid_argument("class '" + name + "' is not in the label map");
      d.class_id = *id;
      d.score = j.at("score").get<double>();
      const auto& b = j.at("bbox");
      if (b.size() != 4) throw std::invalid_argument("bbox needs 4 numbers");
      d.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      dets.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
  }
  return dets;
}

void run_evaluate(const EvaluateOptions& o) {
  const LabelMap labels = load_label_map(o.label_map);
  const auto dets = read_detections(o.detections, labels);
  std::vector<GroundTruth> gts;
  for (const auto& file : list_annotation_files(o.ground_truth)) {
    const Annotation a = load_voc_xml(file);
    for (const auto& obj : a.objects) {
      const auto id = labels.id_of(obj.name);
      if (!id) {
        throw std::invalid_argument(file.string() + ": class '" + obj.name +
                                    "' is not in the label map");
      }
      gts.push_back({a.image_id(), *id, {double(obj.xmin), double(obj.ymin), double(obj.xmax),
                                         double(obj.ymax)}});
    }
  }
  const EvalReport r = coco_map(dets, gts, labels, o.max_per_image);
  const std::string text = to_json(r).dump(2) + "\n";
  if (o.report.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text(o.report, text);
    std::printf("mAP %.4f  AP50 %.4f  AP75 %.4f  AR100 %.4f\n", r.map_coco, r.ap50, r.ap75,
                r.ar_max100);
  }
}

}  // namespace

void add_evaluate(CLI::App& app) {
  auto o = std::make_shared<EvaluateOptions>();
  auto* cmd = app.add_subcommand("evaluate", "Score detections against VOC ground truth");
  cmd->add_option("--detections", o->detections, "Detections JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--ground-truth", o->ground_truth, "Directory of VOC XML files")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--label-map", o->label_map, "Label map (pbtxt)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--report", o->report, "Write the JSON report here instead of stdout");
  cmd->add_option("--max-detections", o->max_per_image, "Detections per image considered")
      ->capture_default_str();
  cmd->callback([o] { run_evaluate(*o); });
}

}  // namespace maskdet::cli
