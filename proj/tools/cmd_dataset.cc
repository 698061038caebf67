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
#include "maskdet/records.h"
#include "json.hpp"

namespace maskdet::cli {
namespace fs = std::filesystem;
namespace {

struct DatasetOptions {
  std::string annotations;
  std::string image_root;
  std::string label_map;
  std::string output;
  std::string records;
  double ratio = 0.9;
  std::uint64_t seed = 0;
  bool check_images = false;
};

fs::path image_path(const fs::path& xml, const Annotation& a, const std::string& root) {
  return (root.empty() ? xml.parent_path() : fs::path(root)) / a.filename;
}

void run_split(const DatasetOptions& o) {
  std::vector<std::string> ids;
  for (const auto& f : list_annotation_files(o.annotations)) ids.push_back(load_voc_xml(f).image_id());
  DatasetSplit s;
  try {
    s = split_dataset(ids, o.ratio, o.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.output.empty()) {
    nlohmann::ordered_json j;
    j["seed"] = s.seed;
    j["train"] = s.train;
    j["test"] = s.test;
    std::printf("%s\n", j.dump(2).c_str());
    return;
  }
  auto listing = [](const std::vector<std::string>& v) {
    std::string text;
    for (const auto& id : v) text += id + "\n";
    return text;
  };
  write_text(fs::path(o.output) / "train.txt", listing(s.train));
  write_text(fs::path(o.output) / "test.txt", listing(s.test));
  std::printf("train %zu  test %zu  seed %llu\n", s.train.size(), s.test.size(),
              static_cast<unsigned long long>(s.seed));
}

void run_convert(const DatasetOptions& o) {
  std::vector<RecordItem> items;
  for (const auto& f : list_annotation_files(o.annotations)) {
    RecordItem item;
    item.annotation = load_voc_xml(f);
    item.image = encode_ppm(read_image(image_path(f, item.annotation, o.image_root)));
    items.push_back(std::move(item));
  }
  std::printf("wrote %zu records to %s\n", write_records(items, o.output), o.output.c_str());
}

void run_stats(const DatasetOptions& o) {
  std::vector<Annotation> all;
  for (const auto& f : list_annotation_files(o.annotations)) all.push_back(load_voc_xml(f));
  const std::string text = to_json(dataset_stats(all)).dump(2) + "\n";
  if (o.output.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text(o.output, text);
  }
}

void run_validate(const DatasetOptions& o) {
  if (o.annotations.empty() && o.records.empty()) {
    throw UsageError("validate needs --annotations or --records");
  }
  std::vector<std::string> problems;
  std::size_t checked = 0;
  if (!o.records.empty()) {
    try {
      checked += read_records(o.records).size();
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  if (!o.annotations.empty()) {
    LabelMap labels;
    if (!o.label_map.empty()) labels = load_label_map(o.label_map);
    for (const auto& f : list_annotation_files(o.annotations)) {
      ++checked;
      Annotation a;
      try {
        a = load_voc_xml(f);
      } catch (const std::exception& e) {
        problems.push_back(f.string() + ": " + e.what());
        continue;
      }
      if (!labels.empty()) {
        for (const auto& obj : a.objects) {
          if (!labels.id_of(obj.name)) {
            problems.push_back(f.string() + ": class '" + obj.name + "' is not in the label map");
          }
        }
      }
      if (o.check_images) {
        try {
          const Image img = read_image(image_path(f, a, o.image_root));
          if (img.width != a.width || img.height != a.height) {
            problems.push_back(f.string() + ": image is " + std::to_string(img.width) + "x" +
                               std::to_string(img.height) + ", annotation says " +
                               std::to_string(a.width) + "x" + std::to_string(a.height));
          }
        } catch (const std::exception& e) {
          problems.push_back(f.string() + ": " + e.what());
        }
      }
    }
  }
  for (const auto& p : problems) std::printf("%s\n", p.c_str());
  std::printf("%zu checked, %zu problems\n", checked, problems.size());
  if (!problems.empty()) throw RunFailed("dataset validation failed");
}

}  // namespace

void add_dataset(CLI::App& app) {
  auto* cmd = app.add_subcommand("dataset", "Annotation tooling");
  cmd->require_subcommand(1);

  auto o = std::make_shared<DatasetOptions>();
  auto* split = cmd->add_subcommand("split", "Deterministic train/test split");
  split->add_option("--annotations", o->annotations, "Directory of VOC XML files")
      ->required()
      ->check(CLI::ExistingDirectory);
  split->add_option("--ratio", o->ratio, "Share of items for training")->capture_default_str();
  split->add_option("--seed", o->seed, "Shuffle seed")->capture_default_str();
  split->add_option("--output", o->output, "Write train.txt and test.txt to this directory");
  split->callback([o] { run_split(*o); });

  auto c = std::make_shared<DatasetOptions>();
  auto* convert = cmd->add_subcommand("convert", "Pack annotations and images into a record file");
  convert->add_option("--annotations", c->annotations, "Directory of VOC XML files")
      ->required()
      ->check(CLI::ExistingDirectory);
  convert->add_option("--image-root", c->image_root, "Resolve image filenames here");
  convert->add_option("--output", c->output, "Record file")->required();
  convert->callback([c] { run_convert(*c); });

  auto s = std::make_shared<DatasetOptions>();
  auto* stats = cmd->add_subcommand("stats", "Class counts and box size histogram");
  stats->add_option("--annotations", s->annotations, "Directory of VOC XML files")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats->add_option("--output", s->output, "Write JSON here instead of stdout");
  stats->callback([s] { run_stats(*s); });

  auto v = std::make_shared<DatasetOptions>();
  auto* validate = cmd->add_subcommand("validate", "Check annotations or a record file");
  validate->add_option("--annotations", v->annotations, "Directory of VOC XML files")
      ->check(CLI::ExistingDirectory);
  validate->add_option("--records", v->records, "Record file")->check(CLI::ExistingFile);
  validate->add_option("--label-map", v->label_map, "Label map (pbtxt)")->check(CLI::ExistingFile);
  validate->add_option("--image-root", v->image_root, "Resolve image filenames here");
  validate->add_flag("--check-images", v->check_images, "Decode images and compare sizes");
  validate->callback([v] { run_validate(*v); });
}

}  // namespace maskdet::cli
