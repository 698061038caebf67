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

#include <filesystem>

#include "cli_runner.h"
#include "json.hpp"
#include "maskdet/dataset.h"
#include "maskdet/image_io.h"

namespace fs = std::filesystem;
using testing_cli::q;
using testing_cli::run;
using testing_cli::scratch;
using testing_cli::slurp;

namespace {

const fs::path kData = MASKDET_TEST_DATA;

// Seed-7 weights shared by the test cases.
fs::path weights() {
  static const fs::path path = [] {
    fs::path p = scratch("weights") / "seed7.ssdw";
    REQUIRE(run("weights init-random --seed 7 --output " + q(p)).code == 0);
    return p;
  }();
  return path;
}

void write_annotation(const fs::path& dir, const std::string& id, int w, int h,
                      const std::vector<maskdet::ObjectBox>& objects) {
  maskdet::Annotation a;
  a.filename = id + ".ppm";
  a.width = w;
  a.height = h;
  a.depth = 3;
  a.objects = objects;
  std::ofstream(dir / (id + ".xml")) << maskdet::write_voc_xml(a);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("detect --input " + q(kData / "frames") + " --output /tmp/x.jsonl").code == 2);
  CHECK(run("detect --weights /nonexistent.ssdw --input " + q(kData / "frames") +
            " --output /tmp/x.jsonl")
            .code == 2);
  CHECK(run("detect --weights " + q(weights()) + " --input /nonexistent_dir --output /tmp/x.jsonl")
            .code == 2);
  CHECK(run("detect --weights " + q(weights()) + " --input " + q(kData / "frames") +
            " --output /tmp/x.jsonl --score-threshold 1.01")
            .code == 2);
  CHECK(run("weights").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("weights inspect and validate") {
  auto inspect = run("weights inspect --weights " + q(weights()));
  CHECK(inspect.code == 0);
  CHECK(inspect.out.find("head.conv.weight") != std::string::npos);
  CHECK(inspect.out.find("[1,1,320,1280]") != std::string::npos);
  auto ok = run("weights validate --weights " + q(weights()));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok") != std::string::npos);

  const fs::path dir = scratch("badweights");
  auto bytes = slurp(weights());
  std::ofstream(dir / "cut.ssdw", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK(run("weights validate --weights " + q(dir / "cut.ssdw")).code == 1);
  CHECK(run("detect --weights " + q(dir / "cut.ssdw") + " --input " + q(kData / "frames") +
            " --output " + q(dir / "d.jsonl"))
            .code == 1);
}

TEST_CASE("detect reproduces the golden file and annotated frame") {
  const fs::path dir = scratch("detect");
  const std::string base = "detect --weights " + q(weights()) + " --input " + q(kData / "frames") +
                           " --score-threshold 0.364 ";
  REQUIRE(run(base + "--output " + q(dir / "a.jsonl") + " --annotate " + q(dir / "ann")).code == 0);
  REQUIRE(run(base + "--output " + q(dir / "b.jsonl")).code == 0);
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  CHECK(slurp(dir / "a.jsonl") == slurp(kData / "golden/detections_seed7.jsonl"));
  CHECK(slurp(dir / "ann/frame_000.ppm") == slurp(kData / "golden/frame_000_annotated.ppm"));
  CHECK(fs::exists(dir / "ann/frame_002.ppm"));

  // Every record has the documented fields.
  std::ifstream in(dir / "a.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("bbox").size() == 4);
    CHECK(j.at("score").get<double>() >= 0.364);
    CHECK(j.at("image").get<std::string>().rfind("frame_", 0) == 0);
  }
}

TEST_CASE("detect on an empty directory and on unreadable frames") {
  const fs::path dir = scratch("detect_edge");
  fs::create_directories(dir / "empty");
  auto r = run("detect --weights " + q(weights()) + " --input " + q(dir / "empty") + " --output " +
               q(dir / "e.jsonl"));
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "e.jsonl"));
  CHECK(fs::file_size(dir / "e.jsonl") == 0);

  fs::create_directories(dir / "mixed");
  fs::copy_file(kData / "frames/frame_000.ppm", dir / "mixed/a.ppm");
  std::ofstream(dir / "mixed/b.ppm") << "not an image";
  const std::string cmd = "detect --weights " + q(weights()) + " --input " + q(dir / "mixed") +
                          " --output " + q(dir / "m.jsonl");
  auto lenient = run(cmd);
  CHECK(lenient.code == 0);
  CHECK(lenient.out.find("1 skipped") != std::string::npos);
  CHECK(run(cmd + " --strict").code == 1);
}

TEST_CASE("evaluate") {
  const fs::path dir = scratch("evaluate");
  fs::create_directories(dir / "gt");
  write_annotation(dir / "gt", "img", 200, 200, {{"Mask", 0, 0, 100, 100}});
  write_annotation(dir / "gt", "img2", 200, 200, {{"NoMask", 50, 50, 150, 120}});
  std::ofstream(dir / "micro.jsonl")
      << R"({"image":"img","class":"Mask","score":0.9,"bbox":[0.0,0.0,100.0,75.0]})" "\n";
  auto micro = run("evaluate --detections " + q(dir / "micro.jsonl") + " --ground-truth " +
                   q(dir / "gt") + " --label-map " + q(kData / "label_map.pbtxt") + " --report " +
                   q(dir / "micro.json"));
  REQUIRE(micro.code == 0);
  auto report = nlohmann::json::parse(slurp(dir / "micro.json"));
  // Mask scores 0.6, NoMask is never found.
  CHECK(report.at("ap_per_class").at("Mask")[0].get<double>() == 1.0);
  CHECK(report.at("map").get<double>() == doctest::Approx(0.3).epsilon(1e-12));

  std::ofstream(dir / "perfect.jsonl")
      << R"({"image":"img","class":"Mask","score":0.9,"bbox":[0.0,0.0,100.0,100.0]})" "\n"
      << R"({"image":"img2","class":"NoMask","score":0.8,"bbox":[50.0,50.0,150.0,120.0]})" "\n";
  auto perfect = run("evaluate --detections " + q(dir / "perfect.jsonl") + " --ground-truth " +
                     q(dir / "gt") + " --label-map " + q(kData / "label_map.pbtxt"));
  REQUIRE(perfect.code == 0);
  CHECK(nlohmann::json::parse(perfect.out).at("map").get<double>() == 1.0);

  std::ofstream(dir / "none.jsonl") << "";
  auto none = run("evaluate --detections " + q(dir / "none.jsonl") + " --ground-truth " +
                  q(dir / "gt") + " --label-map " + q(kData / "label_map.pbtxt"));
  REQUIRE(none.code == 0);
  CHECK(nlohmann::json::parse(none.out).at("map").get<double>() == 0.0);

  std::ofstream(dir / "bad.jsonl") << "{\"image\": 3}\n";
  CHECK(run("evaluate --detections " + q(dir / "bad.jsonl") + " --ground-truth " + q(dir / "gt") +
            " --label-map " + q(kData / "label_map.pbtxt"))
            .code == 1);
}

TEST_CASE("detect output feeds evaluate") {
  const fs::path dir = scratch("roundtrip");
  fs::create_directories(dir / "gt");
  write_annotation(dir / "gt", "frame_000", 320, 240, {{"Mask", 70, 68, 150, 172}});
  auto r = run("evaluate --detections " + q(kData / "golden/detections_seed7.jsonl") +
               " --ground-truth " + q(dir / "gt") + " --label-map " +
               q(kData / "label_map.pbtxt"));
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("counts").at("fp").get<int>() >= 1);
}

TEST_CASE("dataset commands") {
  const fs::path dir = scratch("dataset");
  fs::create_directories(dir / "ann");
  for (int i = 0; i < 100; ++i) {
    write_annotation(dir / "ann", "img" + std::to_string(i), 8, 8,
                     {{i % 2 ? "Mask" : "NoMask", 1, 1, 5, 6}});
  }
  REQUIRE(run("dataset split --annotations " + q(dir / "ann") + " --ratio 0.9 --seed 42 --output " +
              q(dir / "s1"))
              .code == 0);
  REQUIRE(run("dataset split --annotations " + q(dir / "ann") + " --ratio 0.9 --seed 42 --output " +
              q(dir / "s2"))
              .code == 0);
  auto count_lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  CHECK(count_lines(slurp(dir / "s1/train.txt")) == 90);
  CHECK(count_lines(slurp(dir / "s1/test.txt")) == 10);
  CHECK(slurp(dir / "s1/train.txt") == slurp(dir / "s2/train.txt"));
  CHECK(run("dataset split --annotations " + q(dir / "ann") + " --ratio 2").code == 2);

  auto stats = run("dataset stats --annotations " + q(dir / "ann"));
  REQUIRE(stats.code == 0);
  auto j = nlohmann::json::parse(stats.out);
  CHECK(j.at("objects").get<int>() == 100);

  // Convert needs the images next to the XML files.
  fs::create_directories(dir / "small");
  maskdet::Image img(8, 8, 77);
  for (int i = 0; i < 3; ++i) {
    const std::string id = "img" + std::to_string(i);
    fs::copy_file(dir / "ann" / (id + ".xml"), dir / "small" / (id + ".xml"));
    maskdet::write_ppm(img, dir / "small" / (id + ".ppm"));
  }
  auto conv = run("dataset convert --annotations " + q(dir / "small") + " --output " +
                  q(dir / "data.mdr"));
  CHECK(conv.code == 0);
  CHECK(conv.out.find("3 records") != std::string::npos);
  CHECK(run("dataset validate --records " + q(dir / "data.mdr")).code == 0);
  CHECK(run("dataset validate --annotations " + q(dir / "small") + " --check-images --label-map " +
            q(kData / "label_map.pbtxt"))
            .code == 0);

  auto bytes = slurp(dir / "data.mdr");
  bytes[bytes.size() - 1] ^= 0x5a;
  std::ofstream(dir / "bad.mdr", std::ios::binary) << bytes;
  auto bad = run("dataset validate --records " + q(dir / "bad.mdr"));
  CHECK(bad.code == 1);
  CHECK(bad.out.find("record 2") != std::string::npos);

  std::ofstream(dir / "small/img1.xml") << "<annotation>";
  CHECK(run("dataset validate --annotations " + q(dir / "small")).code == 1);
}

TEST_CASE("augment commands") {
  const fs::path dir = scratch("augment");
  const fs::path a = kData / "frames/frame_000.ppm";
  fs::create_directories(dir / "b");
  const auto frame = maskdet::read_image(a);
  maskdet::Image other(frame.width, frame.height, 200);
  maskdet::write_ppm(other, dir / "b/other.ppm");

  const std::string mix = "augment mixup --input " + q(a) + " --other " + q(dir / "b/other.ppm") +
                          " --alpha 0.4 --seed 3 --output ";
  auto m1 = run(mix + q(dir / "m1.ppm") + " --output-annotation " + q(dir / "m1.json"));
  auto m2 = run(mix + q(dir / "m2.ppm"));
  REQUIRE(m1.code == 0);
  REQUIRE(m2.code == 0);
  CHECK(slurp(dir / "m1.ppm") == slurp(dir / "m2.ppm"));
  CHECK(m1.out == m2.out);
  auto mj = nlohmann::json::parse(slurp(dir / "m1.json"));
  const double lambda = mj.at("lambda").get<double>();
  CHECK(lambda >= 0.0);
  CHECK(lambda <= 1.0);
  CHECK(run(mix + q(dir / "m3.ppm") + " --lambda 1.5").code == 2);
  CHECK(run("augment mixup --input " + q(a) + " --other " + q(dir / "b/other.ppm") +
            " --alpha -1 --output " + q(dir / "m4.ppm"))
            .code == 2);

  fs::create_directories(dir / "ann");
  write_annotation(dir / "ann", "frame_000", 320, 240, {{"Mask", 0, 0, 10, 20}});
  REQUIRE(run("augment flip --input " + q(a) + " --annotation " + q(dir / "ann/frame_000.xml") +
              " --output " + q(dir / "f1.ppm") + " --output-annotation " + q(dir / "f1.xml"))
              .code == 0);
  CHECK(maskdet::load_voc_xml(dir / "f1.xml").objects.at(0) == maskdet::ObjectBox{"Mask", 310, 0, 320, 20});
  REQUIRE(run("augment flip --input " + q(dir / "f1.ppm") + " --output " + q(dir / "f2.ppm")).code == 0);
  CHECK(maskdet::read_image(dir / "f2.ppm") == frame);

  REQUIRE(run("augment translate --input " + q(a) + " --annotation " + q(dir / "ann/frame_000.xml") +
              " --dx 10 --output " + q(dir / "t.ppm") + " --output-annotation " + q(dir / "t.xml"))
              .code == 0);
  CHECK(maskdet::load_voc_xml(dir / "t.xml").objects.at(0) == maskdet::ObjectBox{"Mask", 10, 0, 20, 20});

  REQUIRE(run("augment rotate --input " + q(a) + " --degrees 180 --output " + q(dir / "r.ppm")).code == 0);
  CHECK(maskdet::read_image(dir / "r.ppm").width == 320);
  CHECK(run("augment rotate --input " + q(a) + " --output " + q(dir / "r.ppm")).code == 2);
}

TEST_CASE("bench") {
  const fs::path dir = scratch("bench");
  auto r = run("bench --weights " + q(weights()) + " --frames " + q(kData / "frames") +
               " --warmup 0 --repeat 1 --threads 1 --json " + q(dir / "b.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("fps") != std::string::npos);
  auto j = nlohmann::json::parse(slurp(dir / "b.json"));
  CHECK(j.at("frames").get<int>() == 3);
  CHECK(j.at("fps").get<double>() * j.at("total_seconds").get<double>() ==
        doctest::Approx(3.0).epsilon(0.01));
  for (const char* stage : {"preprocess", "forward", "postprocess", "total"}) {
    CHECK(j.at(stage).at("p95_ms").get<double>() >= j.at(stage).at("median_ms").get<double>());
  }
  CHECK(run("bench --weights " + q(weights()) + " --frames " + q(kData / "frames") + " --repeat 0").code == 2);
}
