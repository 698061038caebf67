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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "maskdet/dataset.h"
#include "maskdet/image_io.h"
#include "maskdet/rng.h"

using namespace maskdet;

namespace {

const char* kFixture =
    "<annotation><filename>img1.jpg</filename><size><width>640</width><height>480</height>"
    "<depth>3</depth></size><object><name>Mask</name><bndbox><xmin>48</xmin><ymin>240</ymin>"
    "<xmax>195</xmax><ymax>371</ymax></bndbox></object></annotation>";

Annotation fixture_annotation() {
  Annotation a;
  a.filename = "img1.jpg";
  a.width = 640;
  a.height = 480;
  a.depth = 3;
  a.objects.push_back({"Mask", 48, 240, 195, 371});
  return a;
}

std::string error_of(std::string_view xml) {
  try {
    parse_voc_xml(xml);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("voc fixture parses exactly") {
  Annotation a = parse_voc_xml(kFixture);
  CHECK(a == fixture_annotation());
  CHECK(a.image_id() == "img1");
  const auto bytes = read_file(MASKDET_TEST_DATA "/voc/img1.xml");
  CHECK(std::string(bytes.begin(), bytes.end()) == kFixture);
  CHECK(load_voc_xml(MASKDET_TEST_DATA "/voc/img1.xml") == a);
}

TEST_CASE("voc writer reproduces the fixture") {
  CHECK(write_voc_xml(fixture_annotation()) == kFixture);
}

TEST_CASE("voc round trip on random annotations") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    Annotation a;
    a.filename = "frame_" + std::to_string(i) + ".png";
    a.width = 10 + static_cast<int>(rng.below(1000));
    a.height = 10 + static_cast<int>(rng.below(1000));
    a.depth = 3;
    const int n = static_cast<int>(rng.below(5));
    for (int k = 0; k < n; ++k) {
      ObjectBox o;
      o.name = rng.below(2) ? "Mask" : "NoMask";
      o.xmin = static_cast<int>(rng.below(a.width - 1));
      o.ymin = static_cast<int>(rng.below(a.height - 1));
      o.xmax = o.xmin + 1 + static_cast<int>(rng.below(a.width - o.xmin));
      o.ymax = o.ymin + 1 + static_cast<int>(rng.below(a.height - o.ymin));
      a.objects.push_back(o);
    }
    CHECK(parse_voc_xml(write_voc_xml(a)) == a);
  }
}

TEST_CASE("voc edge cases") {
  Annotation empty = parse_voc_xml(
      "<annotation><filename>a.png</filename><size><width>4</width><height>4</height>"
      "<depth>3</depth></size></annotation>");
  CHECK(empty.objects.empty());

  // Unknown elements and pretty printing are fine.
  Annotation pretty = parse_voc_xml(
      "<annotation>\n  <folder>x</folder>\n  <filename>img1.jpg</filename>\n"
      "  <size><width>640</width><height>480</height><depth>3</depth></size>\n"
      "  <object><name>Mask</name><pose>Unspecified</pose><difficult>0</difficult>\n"
      "    <bndbox><xmin>48</xmin><ymin>240</ymin><xmax>195</xmax><ymax>371</ymax></bndbox>\n"
      "  </object>\n</annotation>\n");
  CHECK(pretty == fixture_annotation());

  const std::string equal = error_of(
      "<annotation><filename>a</filename><size><width>9</width><height>9</height><depth>3</depth>"
      "</size><object><name>Mask</name><bndbox><xmin>3</xmin><ymin>1</ymin><xmax>3</xmax>"
      "<ymax>4</ymax></bndbox></object></annotation>");
  CHECK(equal.find("annotation.object[0].bndbox") != std::string::npos);

  const std::string no_size = error_of("<annotation><filename>a</filename></annotation>");
  CHECK(no_size.find("annotation.size") != std::string::npos);

  const std::string no_box = error_of(
      "<annotation><filename>a</filename><size><width>9</width><height>9</height><depth>3</depth>"
      "</size><object><name>Mask</name></object></annotation>");
  CHECK(no_box.find("annotation.object[0].bndbox") != std::string::npos);

  CHECK_FALSE(error_of("<annotation><filename>a</file").empty());
  CHECK_FALSE(error_of(
                  "<annotation><filename>a</filename><size><width>9</width><height>9</height>"
                  "<depth>3</depth></size><object><name>Mask</name><bndbox><xmin>1</xmin>"
                  "<ymin>1</ymin><xmax>12</xmax><ymax>4</ymax></bndbox></object></annotation>")
                  .empty());
}

TEST_CASE("annotation json round trip") {
  nlohmann::json j = fixture_annotation();
  CHECK(j.get<Annotation>() == fixture_annotation());
}

TEST_CASE("label map fixture") {
  std::vector<std::string> warnings;
  LabelMap m = load_label_map(MASKDET_TEST_DATA "/label_map.pbtxt", &warnings);
  CHECK(warnings.empty());
  CHECK(m.size() == 2);
  CHECK(m.id_of("Mask") == 1);
  CHECK(m.id_of("NoMask") == 2);
  CHECK(m.name_of(2) == "NoMask");
  CHECK_FALSE(m.id_of("NoMsak").has_value());
  CHECK(m.class_names() == std::vector<std::string>{"background", "Mask", "NoMask"});
  CHECK(m.items() == LabelMap::mask_default().items());
}

TEST_CASE("label map grammar") {
  LabelMap m = parse_label_map(
      "# classes\nitem{id:2 name:\"NoMask\" display_name: 'no mask'} item {\n name: 'Mask'\n id: 1 }");
  CHECK(m.id_of("Mask") == 1);
  CHECK(m.id_of("NoMask") == 2);

  std::vector<std::string> warnings;
  LabelMap empty = parse_label_map("  \n", &warnings);
  CHECK(empty.empty());
  CHECK(warnings.size() == 1);

  CHECK_THROWS_AS(parse_label_map("item { id: 1 name: 'a' } item { id: 1 name: 'b' }"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_label_map("item { id: 1 name: 'a' } item { id: 2 name: 'a' }"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_label_map("item { id: 0 name: 'a' }"), std::invalid_argument);
  CHECK_THROWS_AS(parse_label_map("item { id: 1 "), std::invalid_argument);
  CHECK_THROWS_AS(parse_label_map("item { name: 'a' }"), std::invalid_argument);
}

TEST_CASE("split sizes and determinism") {
  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.push_back("img" + std::to_string(i));
  DatasetSplit s = split_dataset(ids, 0.9, 42);
  CHECK(s.train.size() == 90);
  CHECK(s.test.size() == 10);
  DatasetSplit again = split_dataset(ids, 0.9, 42);
  CHECK(s.train == again.train);
  CHECK(s.test == again.test);
  std::set<std::string> all(s.train.begin(), s.train.end());
  for (const auto& t : s.test) CHECK(all.insert(t).second);
  CHECK(all.size() == 100);
  CHECK(split_dataset(ids, 0.9, 43).train != s.train);

  std::vector<std::string> ten(ids.begin(), ids.begin() + 10);
  DatasetSplit small = split_dataset(ten, 0.9, 1);
  CHECK(small.train.size() == 9);
  CHECK(small.test.size() == 1);

  CHECK(split_dataset({}, 0.9, 1).train.empty());
  CHECK_THROWS_AS(split_dataset(ids, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset({"a", "a"}, 0.5, 1), std::invalid_argument);
}

TEST_CASE("dataset stats") {
  Annotation a = fixture_annotation();
  a.objects.push_back({"Mask", 0, 0, 640, 480});
  Annotation b = fixture_annotation();
  b.filename = "img2.jpg";
  b.objects.push_back({"NoMask", 0, 0, 10, 10});
  DatasetStats s = dataset_stats({a, b});
  CHECK(s.images == 2);
  CHECK(s.objects == 4);
  CHECK(s.objects_per_class.at("Mask") == 3);
  CHECK(s.objects_per_class.at("NoMask") == 1);
  CHECK(s.images_per_class.at("Mask") == 2);
  CHECK(s.images_per_class.at("NoMask") == 1);
  CHECK(s.class_balance.at("Mask") == 0.75);
  // 147*131/(640*480) ~ 0.063 three times, full frame lands in the top bin.
  CHECK(s.relative_area_histogram[0] == 3);
  CHECK(s.relative_area_histogram[9] == 1);

  DatasetStats none = dataset_stats({});
  CHECK(none.images == 0);
  CHECK(none.objects == 0);
  CHECK(none.objects_per_class.empty());

  Annotation even = fixture_annotation();
  even.objects.push_back({"NoMask", 1, 1, 5, 5});
  CHECK(dataset_stats({even}).class_balance.at("Mask") == 0.5);
}
