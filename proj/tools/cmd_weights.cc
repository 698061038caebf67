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

namespace maskdet::cli {
namespace {

std::string shape_text(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

void run_inspect(const std::string& path) {
  const WeightStore store = load_weights(path);
  std::printf("%-40s %-18s %12s %10s\n", "name", "shape", "offset", "count");
  for (const auto& e : store.entries()) {
    std::printf("%-40s %-18s %12llu %10zu\n", e.name.c_str(), shape_text(e.shape).c_str(),
                static_cast<unsigned long long>(e.offset), e.element_count());
  }
  std::printf("%zu tensors, %zu parameters\n", store.entries().size(), store.blob().size());
}

void run_validate(const std::string& path) {
  const ValidationReport r = validate_against_architecture(load_weights(path));
  for (const auto& e : r.errors) std::printf("error: %s\n", e.c_str());
  for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
  if (!r.ok()) throw RunFailed(std::to_string(r.errors.size()) + " errors in " + path);
  std::printf("ok (%zu warnings)\n", r.warnings.size());
}

}  // namespace

void add_weights(CLI::App& app) {
  auto* cmd = app.add_subcommand("weights", "Weight container tools");
  cmd->require_subcommand(1);

  auto seed = std::make_shared<std::uint64_t>(7);
  auto out = std::make_shared<std::string>();
  auto* init = cmd->add_subcommand("init-random", "Write seeded random weights");
  init->add_option("--seed", *seed, "Generator seed")->capture_default_str();
  init->add_option("--output", *out, "Weights container")->required();
  init->callback([seed, out] {
    save_weights(init_random(*seed), *out);
    std::printf("wrote %s\n", out->c_str());
  });

  auto inspect_path = std::make_shared<std::string>();
  auto* inspect = cmd->add_subcommand("inspect", "List the manifest");
  inspect->add_option("--weights", *inspect_path, "Weights container")
      ->required()
      ->check(CLI::ExistingFile);
  inspect->callback([inspect_path] { run_inspect(*inspect_path); });

  auto validate_path = std::make_shared<std::string>();
  auto* validate = cmd->add_subcommand("validate", "Check shapes against the architecture");
  validate->add_option("--weights", *validate_path, "Weights container")
      ->required()
      ->check(CLI::ExistingFile);
  validate->callback([validate_path] { run_validate(*validate_path); });
}

}  // namespace maskdet::cli
