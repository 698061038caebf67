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

#include "maskdet/tensor.h"

namespace maskdet {

// 8-bit interleaved RGB image.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // (y * width + x) * 3 + c

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0);

  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  friend bool operator==(const Image&, const Image&) = default;
};

// Binary PPM (P6, maxval 255). Comments in the header are accepted.
Image decode_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const Image& image);

// Dispatches on the file signature: PPM (P6) or PNG.
Image decode_image(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Channel values 0..255 as floats.
Tensor to_tensor(const Image& image);
// Rounds to nearest and clamps to [0, 255].
Image to_image(const Tensor& tensor);

struct Frame {
  std::string id;  // file stem
  std::filesystem::path path;
};

// *.ppm / *.png files of a directory (or a numbered frame dump), sorted
// lexicographically by filename.
std::vector<Frame> list_frames(const std::filesystem::path& dir);

}  // namespace maskdet
