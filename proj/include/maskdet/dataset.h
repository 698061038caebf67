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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace maskdet {

struct ObjectBox {
  std::string name;
  int xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  friend bool operator==(const ObjectBox&, const ObjectBox&) = default;
};

// One Pascal-VOC annotation file.
struct Annotation {
  std::string filename;
  int width = 0, height = 0, depth = 0;
  std::vector<ObjectBox> objects;

  // Stem of `filename`; the key that joins annotations with detections.
  std::string image_id() const;
  // Throws std::invalid_argument if sizes or corners break the invariants
  // 0 <= xmin < xmax <= width (same for y).
  void validate() const;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Errors name the offending element path, e.g.
// "annotation.object[1].bndbox.xmax".
Annotation parse_voc_xml(std::string_view text);
// Compact single-line VOC XML (the layout parse_voc_xml accepts).
std::string write_voc_xml(const Annotation& annotation);
Annotation load_voc_xml(const std::filesystem::path& path);
// All *.xml files of a directory, sorted by filename.
std::vector<std::filesystem::path> list_annotation_files(const std::filesystem::path& dir);

void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);

// Bijective name <-> id map; id 0 is reserved for background.
class LabelMap {
 public:
  // Throws std::invalid_argument on id <= 0, duplicate id or duplicate name.
  void add(int id, const std::string& name);

  std::optional<int> id_of(const std::string& name) const;
  std::optional<std::string> name_of(int id) const;
  std::size_t size() const { return by_id_.size(); }
  bool empty() const { return by_id_.empty(); }
  const std::map<int, std::string>& items() const { return by_id_; }
  int max_id() const { return by_id_.empty() ? 0 : by_id_.rbegin()->first; }

  // Names indexed by id with "background" at 0; gaps become the id text.
  std::vector<std::string> class_names() const;

  static LabelMap mask_default();  // Mask = 1, NoMask = 2

 private:
  std::map<int, std::string> by_id_;
  std::map<std::string, int> by_name_;
};

// Grammar: sequence of `item { id: <int> name: '<text>' }`, whitespace
// insensitive, single or double quotes, '#' comments. Other scalar fields
// inside an item are ignored. An empty input yields an empty map and a
// warning.
LabelMap parse_label_map(std::string_view text, std::vector<std::string>* warnings = nullptr);
LabelMap load_label_map(const std::filesystem::path& path,
                        std::vector<std::string>* warnings = nullptr);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

// Fisher-Yates shuffle driven by Rng(seed) (std::mt19937_64 with
// rejection-sampled indices), then the first round(ratio * N) go to train.
DatasetSplit split_dataset(std::vector<std::string> item_ids, double ratio = 0.9,
                           std::uint64_t seed = 0);

struct DatasetStats {
  std::size_t images = 0;
  std::size_t objects = 0;
  std::map<std::string, std::size_t> objects_per_class;
  std::map<std::string, std::size_t> images_per_class;
  std::map<std::string, double> class_balance;  // share of all objects
  // Ten bins over box area / image area: [0,0.1), [0.1,0.2), ..., [0.9,1.0].
  std::vector<std::size_t> relative_area_histogram = std::vector<std::size_t>(10, 0);
};

DatasetStats dataset_stats(const std::vector<Annotation>& annotations);
nlohmann::json to_json(const DatasetStats& stats);

}  // namespace maskdet
