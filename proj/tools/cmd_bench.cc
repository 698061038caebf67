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
#include "maskdet/bench.h"
#include "maskdet/image_io.h"
#include "json.hpp"

namespace maskdet::cli {
namespace {

struct BenchCliOptions {
  std::string weights;
  std::string frames;
  std::string json;
  BenchOptions bench;
  PostprocessConfig config;
};

void run_bench_cmd(const BenchCliOptions& o) {
  check_postprocess(o.config);
  if (o.bench.warmup < 0 || o.bench.repeat < 1) throw UsageError("need --warmup >= 0 and --repeat >= 1");
  const SsdModel model = load_model(o.weights);
  std::vector<Tensor> frames;
  for (const auto& f : list_frames(o.frames)) frames.push_back(to_tensor(read_image(f.path)));
  if (frames.empty()) throw UsageError("no frames in " + o.frames);
  const BenchReport r = run_bench(model, frames, o.config, o.bench);
  std::fputs(format_table(r).c_str(), stdout);
  if (!o.json.empty()) write_text(o.json, to_json(r).dump(2) + "\n");
}

}  // namespace

void add_bench(CLI::App& app) {
  auto o = std::make_shared<BenchCliOptions>();
  auto* cmd = app.add_subcommand("bench", "Time detection over a set of frames");
  cmd->add_option("--weights", o->weights, "Weights container")->required()->check(CLI::ExistingFile);
  cmd->add_option("--frames", o->frames, "Directory of .ppm/.png frames")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--warmup", o->bench.warmup, "Untimed passes")->capture_default_str();
  cmd->add_option("--repeat", o->bench.repeat, "Timed passes")->capture_default_str();
  cmd->add_option("--threads", o->bench.threads, "Workers (0: MASKDET_THREADS or all cores)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--json", o->json, "Also write the report as JSON");
  add_postprocess_flags(cmd, o->config);
  cmd->callback([o] { run_bench_cmd(*o); });
}

}  // namespace maskdet::cli
