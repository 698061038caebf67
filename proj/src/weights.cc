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

#include "maskdet/weights.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "maskdet/rng.h"

namespace maskdet {
namespace {

using json = nlohmann::json;

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

float load_f32_le(const std::uint8_t* p) {
  std::uint32_t bits = get_u32(p);
  return std::bit_cast<float>(bits);
}

void store_f32_le(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

const char* const kBnFields[] = {"gamma", "beta", "mean", "variance"};

}  // namespace

std::size_t ManifestEntry::element_count() const {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

WeightStore WeightStore::from_parts(std::vector<ManifestEntry> entries,
                                    std::vector<float> blob) {
  const std::uint64_t blob_bytes = static_cast<std::uint64_t>(blob.size()) * 4;
  std::uint64_t prev_end = 0;
  std::uint64_t total = 0;
  std::set<std::string> names;
  for (const auto& e : entries) {
    if (e.dtype != "f32") {
      throw std::invalid_argument(e.name + ": unsupported dtype '" + e.dtype + "'");
    }
    if (!names.insert(e.name).second) {
      throw std::invalid_argument(e.name + ": duplicate manifest entry");
    }
    for (int d : e.shape) {
      if (d <= 0) throw std::invalid_argument(e.name + ": non-positive dim in shape " + shape_str(e.shape));
    }
    if (e.offset % 4 != 0) {
      throw std::invalid_argument(e.name + ": offset " + std::to_string(e.offset) +
                                  " is not 4-byte aligned");
    }
    if (e.offset < prev_end) {
      throw std::invalid_argument(e.name + ": offset " + std::to_string(e.offset) +
                                  " overlaps the previous entry or is out of order");
    }
    const std::uint64_t bytes = static_cast<std::uint64_t>(e.element_count()) * 4;
    const std::uint64_t end = e.offset + bytes;
    if (end > blob_bytes) {
      throw std::invalid_argument(e.name + ": extends to byte " + std::to_string(end) +
                                  " beyond blob end " + std::to_string(blob_bytes));
    }
    for (std::uint64_t i = e.offset / 4; i < end / 4; ++i) {
      if (!std::isfinite(blob[i])) {
        throw std::invalid_argument(e.name + ": non-finite value at element " +
                                    std::to_string(i - e.offset / 4));
      }
    }
    prev_end = end;
    total += bytes;
  }
  if (total != blob_bytes) {
    throw std::invalid_argument("blob length " + std::to_string(blob_bytes) +
                                " bytes does not match manifest total " +
                                std::to_string(total));
  }
  WeightStore store;
  store.entries_ = std::move(entries);
  store.blob_ = std::move(blob);
  return store;
}

void WeightStore::add(const std::string& name, std::vector<int> shape,
                      std::span<const float> values) {
  if (contains(name)) throw std::invalid_argument(name + ": duplicate manifest entry");
  ManifestEntry e{name, std::move(shape), static_cast<std::uint64_t>(blob_.size()) * 4, "f32"};
  if (e.element_count() != values.size()) {
    throw std::invalid_argument(name + ": " + std::to_string(values.size()) +
                                " values for shape " + shape_str(e.shape));
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(name + ": non-finite value");
  }
  blob_.insert(blob_.end(), values.begin(), values.end());
  entries_.push_back(std::move(e));
}

const ManifestEntry* WeightStore::find(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::span<const float> WeightStore::values(const std::string& name) const {
  const ManifestEntry* e = find(name);
  if (!e) throw std::out_of_range("weight '" + name + "' not found");
  return std::span<const float>(blob_).subspan(e->offset / 4, e->element_count());
}

bool operator==(const WeightStore& a, const WeightStore& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.name != y.name || x.shape != y.shape || x.offset != y.offset || x.dtype != y.dtype) {
      return false;
    }
  }
  // Bitwise, so -0.0 vs 0.0 counts as a difference.
  return a.blob_.size() == b.blob_.size() &&
         std::memcmp(a.blob_.data(), b.blob_.data(), a.blob_.size() * sizeof(float)) == 0;
}

std::vector<std::uint8_t> serialize_weights(const WeightStore& store) {
  json manifest;
  manifest["entries"] = json::array();
  for (const auto& e : store.entries()) {
    manifest["entries"].push_back(
        {{"name", e.name}, {"shape", e.shape}, {"offset", e.offset}, {"dtype", e.dtype}});
  }
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> out(std::begin(kWeightsMagic), std::end(kWeightsMagic));
  put_u32(out, kWeightsVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + store.blob().size() * 4);
  for (float v : store.blob()) store_f32_le(out, v);
  return out;
}

WeightStore parse_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw std::invalid_argument("weights: truncated header");
  if (std::memcmp(bytes.data(), kWeightsMagic, 4) != 0) {
    throw std::invalid_argument("weights: bad magic");
  }
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kWeightsVersion) {
    throw std::invalid_argument("weights: unsupported version " + std::to_string(version));
  }
  const std::uint64_t manifest_len = get_u32(bytes.data() + 8);
  if (12 + manifest_len > bytes.size()) {
    throw std::invalid_argument("weights: manifest extends past end of file");
  }
  json manifest;
  try {
    manifest = json::parse(bytes.begin() + 12, bytes.begin() + 12 + manifest_len);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("weights: malformed manifest: ") + e.what());
  }
  const std::size_t blob_bytes = bytes.size() - 12 - manifest_len;
  if (blob_bytes % 4 != 0) {
    throw std::invalid_argument("weights: blob length " + std::to_string(blob_bytes) +
                                " is not a multiple of 4");
  }
  std::vector<ManifestEntry> entries;
  try {
    for (const auto& item : manifest.at("entries")) {
      ManifestEntry e;
      e.name = item.at("name").get<std::string>();
      e.shape = item.at("shape").get<std::vector<int>>();
      e.offset = item.at("offset").get<std::uint64_t>();
      e.dtype = item.value("dtype", std::string("f32"));
      entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("weights: malformed manifest: ") + e.what());
  }
  std::vector<float> blob(blob_bytes / 4);
  const std::uint8_t* p = bytes.data() + 12 + manifest_len;
  for (std::size_t i = 0; i < blob.size(); ++i) blob[i] = load_f32_le(p + 4 * i);
  return WeightStore::from_parts(std::move(entries), std::move(blob));
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(store);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weights file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_weights(bytes);
}

ValidationReport validate_against_architecture(const WeightStore& store,
                                               const ModelConfig& config) {
  ValidationReport report;
  std::set<std::string> expected_names;
  auto check_shape = [&](const std::string& name, const std::vector<int>& shape) {
    const ManifestEntry* e = store.find(name);
    if (!e) return false;
    if (e->shape != shape) {
      report.errors.push_back(name + ": shape mismatch, expected " + shape_str(shape) +
                              " got " + shape_str(e->shape));
    }
    return true;
  };

  for (const auto& layer : architecture_layers(config)) {
    const std::string w = layer.name + ".weight";
    const std::string b = layer.name + ".bias";
    expected_names.insert(w);
    expected_names.insert(b);
    expected_names.insert(layer.name + ".bn.epsilon");
    for (const char* f : kBnFields) expected_names.insert(layer.name + ".bn." + f);

    bool any = false;
    for (const auto& e : store.entries()) {
      if (e.name.rfind(layer.name + ".", 0) == 0) {
        any = true;
        break;
      }
    }
    if (!any) {
      report.errors.push_back(layer.name + ": missing layer");
      continue;
    }
    if (!check_shape(w, layer.weight_shape())) report.errors.push_back(w + ": missing");

    const bool has_bias = check_shape(b, layer.bias_shape());
    int bn_present = 0;
    for (const char* f : kBnFields) {
      if (check_shape(layer.name + ".bn." + f, layer.bias_shape())) ++bn_present;
    }
    if (bn_present > 0 && bn_present < 4) {
      for (const char* f : kBnFields) {
        const std::string n = layer.name + ".bn." + f;
        if (!store.contains(n)) report.errors.push_back(n + ": missing (incomplete batch norm)");
      }
    }
    if (!has_bias && bn_present == 0) report.errors.push_back(b + ": missing");
    const std::string eps = layer.name + ".bn.epsilon";
    if (check_shape(eps, {1})) {
      auto v = store.values(eps);
      if (v.size() == 1 && !(v[0] > 0.0f)) {
        report.errors.push_back(eps + ": must be positive");
      }
    }
    if (bn_present == 4) {
      const ManifestEntry* var = store.find(layer.name + ".bn.variance");
      if (var->shape == layer.bias_shape()) {
        for (float v : store.values(var->name)) {
          if (v < 0.0f) {
            report.errors.push_back(var->name + ": negative variance");
            break;
          }
        }
      }
    }
  }
  for (const auto& e : store.entries()) {
    if (!expected_names.count(e.name)) {
      report.warnings.push_back(e.name + ": not used by the architecture");
    }
  }
  return report;
}

WeightStore init_random(std::uint64_t seed, const ModelConfig& config) {
  Rng rng(seed);
  WeightStore store;
  for (const auto& layer : architecture_layers(config)) {
    const int fan_in = layer.kernel * layer.kernel *
                       (layer.kind == LayerKind::kDepthwise ? 1 : layer.in_channels);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    auto fill = [&](const std::vector<int>& shape) {
      std::size_t n = 1;
      for (int d : shape) n *= static_cast<std::size_t>(d);
      std::vector<float> v(n);
      for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0) * scale);
      return v;
    };
    const auto ws = layer.weight_shape();
    const auto bs = layer.bias_shape();
    store.add(layer.name + ".weight", ws, fill(ws));
    store.add(layer.name + ".bias", bs, fill(bs));
  }
  return store;
}

}  // namespace maskdet
