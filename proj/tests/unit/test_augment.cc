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

#include <algorithm>

#include "maskdet/augment.h"
#include "maskdet/rng.h"
#include "oracles.h"

using namespace maskdet;

namespace {

MixupSample sample(Tensor img, std::vector<double> label) {
  MixupSample s;
  s.image = std::move(img);
  s.label = std::move(label);
  return s;
}

}  // namespace

TEST_CASE("mixup examples") {
  MixupSample a = sample(Tensor(4, 4, 3, 100.0f), {1, 0});
  MixupSample b = sample(Tensor(4, 4, 3, 200.0f), {0, 1});
  a.boxes.push_back({"Mask", {0, 0, 2, 2}, 1.0});
  b.boxes.push_back({"NoMask", {1, 1, 3, 3}, 1.0});

  MixupSample one = mixup(a, b, 1.0);
  CHECK(one.image == a.image);
  CHECK(one.label == a.label);

  MixupSample half = mixup(a, b, 0.5);
  for (float v : half.image.data()) CHECK(v == 150.0f);

  MixupSample m = mixup(a, b, 0.4);
  CHECK(m.label[0] == doctest::Approx(0.4));
  CHECK(m.label[1] == doctest::Approx(0.6));
  REQUIRE(m.boxes.size() == 2);
  CHECK(m.boxes[0].weight == doctest::Approx(0.4));
  CHECK(m.boxes[1].weight == doctest::Approx(0.6));

  CHECK_THROWS_AS(mixup(a, sample(Tensor(4, 5, 3), {0, 1}), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mixup(a, b, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(mixup(a, b, -0.1), std::invalid_argument);
}

TEST_CASE("mixup symmetry, convexity and simplex") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    MixupSample a = sample(oracle::random_tensor(rng, 5, 6, 3, 0, 255), {});
    MixupSample b = sample(oracle::random_tensor(rng, 5, 6, 3, 0, 255), {});
    double p = rng.uniform01(), q = rng.uniform01();
    a.label = {p, 1 - p};
    b.label = {q, 1 - q};
    const double lambda = trial == 0 ? 0.5 : rng.uniform01();
    MixupSample ab = mixup(a, b, lambda);
    MixupSample ba = mixup(b, a, 1.0 - lambda);
    REQUIRE(ab.image == ba.image);
    REQUIRE(ab.label == ba.label);
    CHECK(ab.label[0] + ab.label[1] == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 0; i < ab.image.size(); ++i) {
      const float lo = std::min(a.image.data()[i], b.image.data()[i]);
      const float hi = std::max(a.image.data()[i], b.image.data()[i]);
      CHECK(ab.image.data()[i] >= lo);
      CHECK(ab.image.data()[i] <= hi);
    }
  }
}

TEST_CASE("beta sampling") {
  Rng rng(2020);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double l = sample_lambda(rng, 0.4);
    REQUIRE(l >= 0.0);
    REQUIRE(l <= 1.0);
    sum += l;
  }
  const double mean = sum / 10000;
  CHECK(mean >= 0.48);
  CHECK(mean <= 0.52);

  Rng r1(5), r2(5);
  for (int i = 0; i < 50; ++i) CHECK(sample_lambda(r1, 0.4) == sample_lambda(r2, 0.4));
  CHECK_THROWS_AS(sample_lambda(r1, 0.0), std::invalid_argument);
  MixupConfig bad;
  bad.alpha = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("beta variance is close to the closed form") {
  // Var Beta(a, a) = 1 / (4 (2a + 1)).
  Rng rng(99);
  const double alpha = 0.4;
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double l = sample_lambda(rng, alpha);
    s += l;
    s2 += l * l;
  }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(var == doctest::Approx(1.0 / (4 * (2 * alpha + 1))).epsilon(0.05));
}

TEST_CASE("flip") {
  Rng rng(1);
  Tensor img = oracle::random_tensor(rng, 7, 100, 3);
  std::vector<LabeledBox> boxes = {{"Mask", {0, 0, 10, 20}, 1.0}, {"Mask", {40, 5, 60, 6}, 1.0}};
  Augmented f = flip_horizontal(img, boxes);
  CHECK(f.boxes[0].box == Box{90, 0, 100, 20});
  CHECK(f.boxes[1].box == boxes[1].box);
  CHECK(f.image.at(3, 0, 1) == img.at(3, 99, 1));
  Augmented back = flip_horizontal(f.image, f.boxes);
  CHECK(back.image == img);
  CHECK(back.boxes == boxes);
}

TEST_CASE("translate") {
  Rng rng(2);
  Tensor img = oracle::random_tensor(rng, 50, 100, 3);
  std::vector<LabeledBox> boxes = {{"Mask", {0, 0, 20, 20}, 1.0}};
  Augmented same = translate(img, boxes, 0, 0);
  CHECK(same.image == img);
  CHECK(same.boxes == boxes);

  Augmented moved = translate(img, boxes, 10, 0);
  REQUIRE(moved.boxes.size() == 1);
  CHECK(moved.boxes[0].box == Box{10, 0, 30, 20});
  CHECK(moved.image.at(5, 10, 0) == img.at(5, 0, 0));
  CHECK(moved.image.at(5, 9, 0) == 0.0f);

  CHECK(translate(img, boxes, 100, 0).boxes.empty());
  // 10 of 20 columns stay visible: kept, clipped.
  Augmented half = translate(img, boxes, -10, 0);
  REQUIRE(half.boxes.size() == 1);
  CHECK(half.boxes[0].box == Box{0, 0, 10, 20});
  // 4 of 20 columns stay visible: 20% < 25%, dropped.
  CHECK(translate(img, boxes, -16, 0).boxes.empty());
}

TEST_CASE("rotate") {
  Rng rng(3);
  Tensor img = oracle::random_tensor(rng, 100, 100, 3);
  std::vector<LabeledBox> boxes = {{"Mask", {0, 0, 10, 10}, 1.0}};
  Augmented zero = rotate(img, boxes, 0);
  CHECK(zero.image == img);
  CHECK(zero.boxes == boxes);

  Augmented half_turn = rotate(img, boxes, 180);
  REQUIRE(half_turn.boxes.size() == 1);
  CHECK(half_turn.boxes[0].box == Box{90, 90, 100, 100});
  CHECK(half_turn.image.at(0, 0, 2) == img.at(99, 99, 2));

  // A quarter turn counterclockwise: out(y, x) = in(x, W - 1 - y).
  Tensor sq = oracle::random_tensor(rng, 9, 9, 2);
  Augmented q = rotate(sq, {}, 90);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x)
      for (int c = 0; c < 2; ++c) REQUIRE(q.image.at(y, x, c) == sq.at(x, 8 - y, c));

  Augmented four = rotate(rotate(rotate(rotate(sq, {}, 90).image, {}, 90).image, {}, 90).image, {}, 90);
  CHECK(four.image == sq);

  // Box corners in the top-left move to the bottom-left for +90.
  Augmented qb = rotate(img, boxes, 90);
  REQUIRE(qb.boxes.size() == 1);
  CHECK(qb.boxes[0].box == Box{0, 90, 10, 100});
  CHECK_THROWS_AS(rotate(img, boxes, std::nan("")), std::invalid_argument);
}

TEST_CASE("geometric ops keep boxes valid and inside the frame") {
  Rng rng(4);
  Tensor img(60, 80, 3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<LabeledBox> boxes;
    for (int i = 0; i < 5; ++i) {
      double x = rng.uniform(0, 70), y = rng.uniform(0, 50);
      boxes.push_back({"Mask", {x, y, x + rng.uniform(1, 10), y + rng.uniform(1, 10)}, 1.0});
    }
    std::vector<Augmented> outs;
    outs.push_back(translate(img, boxes, static_cast<int>(rng.uniform(-20, 20)),
                             static_cast<int>(rng.uniform(-20, 20))));
    outs.push_back(rotate(img, boxes, rng.uniform(-180, 180)));
    outs.push_back(flip_horizontal(img, boxes));
    for (const auto& o : outs) {
      for (const auto& b : o.boxes) {
        CHECK(b.box.valid());
        CHECK(b.box.x_min >= 0);
        CHECK(b.box.y_min >= 0);
        CHECK(b.box.x_max <= 80);
        CHECK(b.box.y_max <= 60);
      }
    }
  }
}

TEST_CASE("annotation conversion") {
  Annotation a;
  a.filename = "x.ppm";
  a.width = 100;
  a.height = 50;
  a.depth = 3;
  a.objects.push_back({"Mask", 1, 2, 30, 40});
  auto boxes = boxes_from_annotation(a);
  CHECK(annotation_with_boxes(a, boxes) == a);
  boxes.push_back({"NoMask", {10.2, 10.2, 10.4, 10.4}, 1.0});  // collapses
  boxes.push_back({"NoMask", {20.4, -3, 30.6, 60}, 1.0});
  Annotation out = annotation_with_boxes(a, boxes);
  REQUIRE(out.objects.size() == 2);
  CHECK(out.objects[1] == ObjectBox{"NoMask", 20, 0, 31, 50});
}
