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

#include "maskdet/image_io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace maskdet {

Image::Image(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("image dims must be positive");
  pixels.assign(static_cast<std::size_t>(w) * h * 3, fill);
}

namespace {

// Reads one ASCII header token, skipping whitespace and '#' comments.
std::string ppm_token(std::span<const std::uint8_t> b, std::size_t& pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok += static_cast<char>(b[pos++]);
  if (tok.empty()) throw std::invalid_argument("ppm: truncated header");
  return tok;
}

int ppm_int(std::span<const std::uint8_t> b, std::size_t& pos, const char* what) {
  std::string tok = ppm_token(b, pos);
  if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); }) ||
      tok.size() > 9) {
    throw std::invalid_argument(std::string("ppm: bad ") + what + " '" + tok + "'");
  }
  return std::stoi(tok);
}

bool is_png(std::span<const std::uint8_t> b) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw std::invalid_argument(std::string("png: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  Image out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw std::invalid_argument("png: " + msg);
  }
  return out;
}

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  if (ppm_token(bytes, pos) != "P6") throw std::invalid_argument("ppm: not a P6 file");
  const int w = ppm_int(bytes, pos, "width");
  const int h = ppm_int(bytes, pos, "height");
  const int maxval = ppm_int(bytes, pos, "maxval");
  if (w <= 0 || h <= 0) throw std::invalid_argument("ppm: dims must be positive");
  if (maxval != 255) throw std::invalid_argument("ppm: only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw std::invalid_argument("ppm: missing separator before raster");
  }
  ++pos;
  Image img(w, h);
  if (bytes.size() - pos < img.pixels.size()) throw std::invalid_argument("ppm: truncated raster");
  std::copy_n(bytes.begin() + pos, img.pixels.size(), img.pixels.begin());
  return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  throw std::invalid_argument("unsupported image format (expected PPM P6 or PNG)");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  write_file(path, encode_ppm(image));
}

Tensor to_tensor(const Image& image) {
  std::vector<float> data(image.pixels.begin(), image.pixels.end());
  return Tensor(image.height, image.width, 3, std::move(data));
}

Image to_image(const Tensor& tensor) {
  if (tensor.channels() != 3) throw std::invalid_argument("to_image: need 3 channels");
  Image img(tensor.width(), tensor.height());
  auto src = tensor.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::nearbyint(src[i]), 0.0f, 255.0f));
  }
  return img;
}

std::vector<Frame> list_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + " is not a directory");
  }
  std::vector<Frame> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext != ".ppm" && ext != ".png") continue;
    frames.push_back({entry.path().stem().string(), entry.path()});
  }
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) {
    return a.path.filename().string() < b.path.filename().string();
  });
  return frames;
}

}  // namespace maskdet
