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
#include "maskdet/augment.h"
#include "maskdet/dataset.h"
#include "maskdet/image_io.h"
#include "maskdet/rng.h"
#include "json.hpp"

namespace maskdet::cli {
namespace {

struct AugmentOptions {
  std::string input;
  std::string annotation;
  std::string output;
  std::string output_annotation;
  // mixup
  std::string other;
  std::string other_annotation;
  double alpha = 0.4;
  std::uint64_t seed = 0;
  double lambda = -1;
  // translate / rotate
  int dx = 0, dy = 0;
  double degrees = 0;
};

struct Loaded {
  Annotation annotation;
  Tensor image;
  std::vector<LabeledBox> boxes;
};

Loaded load(const std::string& image, const std::string& xml) {
  Loaded l;
  const Image img = read_image(image);
  l.image = to_tensor(img);
  if (!xml.empty()) {
    l.annotation = load_voc_xml(xml);
    l.boxes = boxes_from_annotation(l.annotation);
  } else {
    l.annotation.filename = std::filesystem::path(image).filename().string();
    l.annotation.width = img.width;
    l.annotation.height = img.height;
    l.annotation.depth = 3;
  }
  return l;
}

void save(const AugmentOptions& o, const Loaded& src, const Augmented& result) {
  write_ppm(to_image(result.image), o.output);
  if (o.output_annotation.empty()) return;
  Annotation a = annotation_with_boxes(src.annotation, result.boxes);
  a.filename = std::filesystem::path(o.output).filename().string();
  write_text(o.output_annotation, write_voc_xml(a));
}

void add_io_flags(CLI::App* cmd, AugmentOptions& o) {
  cmd->add_option("--input", o.input, "Input image")->required()->check(CLI::ExistingFile);
  cmd->add_option("--annotation", o.annotation, "VOC XML for the input")->check(CLI::ExistingFile);
  cmd->add_option("--output", o.output, "Output image (PPM)")->required();
  cmd->add_option("--output-annotation", o.output_annotation, "Output annotation");
}

void run_mixup(const AugmentOptions& o) {
  MixupConfig config{o.alpha, o.seed};
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Loaded a = load(o.input, o.annotation);
  const Loaded b = load(o.other, o.other_annotation);
  if (!a.image.same_shape(b.image)) throw UsageError("mixup images must have the same size");
  double lambda = o.lambda;
  if (lambda < 0) {
    Rng rng(config.seed);
    lambda = sample_lambda(rng, config.alpha);
  }
  MixupSample sa{a.image, {1.0, 0.0}, a.boxes};
  MixupSample sb{b.image, {0.0, 1.0}, b.boxes};
  const MixupSample m = mixup(sa, sb, lambda);
  write_ppm(to_image(m.image), o.output);
  if (!o.output_annotation.empty()) {
    nlohmann::ordered_json j;
    j["lambda"] = lambda;
    j["label"] = m.label;
    j["boxes"] = nlohmann::json::array();
    for (const auto& box : m.boxes) {
      j["boxes"].push_back({{"class", box.name},
                            {"weight", box.weight},
                            {"bbox", {box.box.x_min, box.box.y_min, box.box.x_max, box.box.y_max}}});
    }
    write_text(o.output_annotation, j.dump(2) + "\n");
  }
  std::printf("lambda %.17g\n", lambda);
}

}  // namespace

void add_augment(CLI::App& app) {
  auto* cmd = app.add_subcommand("augment", "Image augmentation");
  cmd->require_subcommand(1);

  auto m = std::make_shared<AugmentOptions>();
  auto* mix = cmd->add_subcommand("mixup", "Blend two images with lambda ~ Beta(alpha, alpha)");
  add_io_flags(mix, *m);
  mix->add_option("--other", m->other, "Second image")->required()->check(CLI::ExistingFile);
  mix->add_option("--other-annotation", m->other_annotation, "VOC XML for the second image")
      ->check(CLI::ExistingFile);
  mix->add_option("--alpha", m->alpha, "Beta distribution parameter")->capture_default_str();
  mix->add_option("--seed", m->seed, "Sampling seed")->capture_default_str();
  mix->add_option("--lambda", m->lambda, "Fixed mixing weight instead of sampling")
      ->check(CLI::Range(0.0, 1.0));
  mix->callback([m] { run_mixup(*m); });

  auto f = std::make_shared<AugmentOptions>();
  auto* flip = cmd->add_subcommand("flip", "Mirror horizontally");
  add_io_flags(flip, *f);
  flip->callback([f] {
    const Loaded l = load(f->input, f->annotation);
    save(*f, l, flip_horizontal(l.image, l.boxes));
  });

  auto t = std::make_shared<AugmentOptions>();
  auto* shift = cmd->add_subcommand("translate", "Shift by whole pixels with zero fill");
  add_io_flags(shift, *t);
  shift->add_option("--dx", t->dx, "Horizontal shift (right positive)")->capture_default_str();
  shift->add_option("--dy", t->dy, "Vertical shift (down positive)")->capture_default_str();
  shift->callback([t] {
    const Loaded l = load(t->input, t->annotation);
    save(*t, l, translate(l.image, l.boxes, t->dx, t->dy));
  });

  auto r = std::make_shared<AugmentOptions>();
  auto* rot = cmd->add_subcommand("rotate", "Rotate about the image center");
  add_io_flags(rot, *r);
  rot->add_option("--degrees", r->degrees, "Counterclockwise angle")->required();
  rot->callback([r] {
    const Loaded l = load(r->input, r->annotation);
    save(*r, l, rotate(l.image, l.boxes, r->degrees));
  });
}

}  // namespace maskdet::cli
