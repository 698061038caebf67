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
#include <span>
#include <string>
#include <vector>

#include "maskdet/model.h"

namespace maskdet {

// Container layout:
//   "SSDW" | u32 LE version (1) | u32 LE manifest length | JSON manifest |
//   raw little-endian f32 blob.
// The manifest is {"entries": [{"name", "shape", "offset", "dtype"}]} with
// byte offsets relative to the blob start.
inline constexpr char kWeightsMagic[4] = {'S', 'S', 'D', 'W'};
inline constexpr std::uint32_t kWeightsVersion = 1;

struct ManifestEntry {
  std::string name;
  std::vector<int> shape;
  std::uint64_t offset = 0;  // bytes
  std::string dtype = "f32";

  std::size_t element_count() const;
};

class WeightStore {
 public:
  WeightStore() = default;

  // Validates entry layout against the blob (ascending, non-overlapping,
  // in-bounds, total size equals blob size, finite values).
  static WeightStore from_parts(std::vector<ManifestEntry> entries, std::vector<float> blob);

  // Appends a tensor at the end of the blob.
  void add(const std::string& name, std::vector<int> shape, std::span<const float> values);

  bool contains(const std::string& name) const { return find(name) != nullptr; }
  const ManifestEntry* find(const std::string& name) const;
  // Throws std::out_of_range naming the tensor when absent.
  std::span<const float> values(const std::string& name) const;

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  std::span<const float> blob() const { return blob_; }

  friend bool operator==(const WeightStore& a, const WeightStore& b);

 private:
  std::vector<ManifestEntry> entries_;
  std::vector<float> blob_;
};

std::vector<std::uint8_t> serialize_weights(const WeightStore& store);
WeightStore parse_weights(std::span<const std::uint8_t> bytes);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Checks every required `<layer>.weight` / `<layer>.bias` (or the
// `<layer>.bn.*` set) against the shapes implied by the config. A layer with
// no entries at all yields a single "missing layer" error; unrecognized
// names are warnings.
ValidationReport validate_against_architecture(const WeightStore& store,
                                               const ModelConfig& config = {});

// Every architecture tensor filled with U(-1, 1) / sqrt(fan_in) from a
// seeded Rng; biases use their layer's fan_in.
WeightStore init_random(std::uint64_t seed, const ModelConfig& config = {});

}  // namespace maskdet
