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

#include "maskdet/image_io.h"
#include "maskdet/records.h"
#include "maskdet/rng.h"

using namespace maskdet;

namespace {

RecordItem make_item(Rng& rng, int i) {
  RecordItem item;
  item.annotation.filename = "img" + std::to_string(i) + ".ppm";
  item.annotation.width = 4;
  item.annotation.height = 3;
  item.annotation.depth = 3;
  item.annotation.objects.push_back({"Mask", 0, 0, 2, 2});
  Image img(4, 3);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  item.image = encode_ppm(img);
  return item;
}

std::string decode_error(std::span<const std::uint8_t> bytes) {
  try {
    decode_record_file(bytes);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("crc32 check value") {
  const std::string s = "123456789";
  CHECK(crc32_ieee({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}) == 0xCBF43926u);
}

TEST_CASE("empty file with header") {
  auto bytes = encode_record_file({});
  CHECK(bytes.size() == 4);
  CHECK(decode_record_file(bytes).empty());
}

TEST_CASE("framing round trip on arbitrary payloads") {
  Rng rng(8);
  std::vector<std::vector<std::uint8_t>> payloads;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::uint8_t> p(rng.below(5000));
    for (auto& b : p) b = static_cast<std::uint8_t>(rng.below(256));
    payloads.push_back(std::move(p));
  }
  payloads.emplace_back();  // zero length
  auto file = encode_record_file(payloads);
  CHECK(decode_record_file(file) == payloads);
  CHECK(encode_record_file(decode_record_file(file)) == file);
}

TEST_CASE("large payload") {
  std::vector<std::uint8_t> big(8u << 20);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<std::uint8_t>(i * 2654435761u >> 24);
  auto file = encode_record_file({big});
  CHECK(decode_record_file(file).at(0) == big);
}

TEST_CASE("items round trip through a file") {
  Rng rng(9);
  std::vector<RecordItem> items;
  for (int i = 0; i < 3; ++i) items.push_back(make_item(rng, i));
  const auto path = std::filesystem::temp_directory_path() / "maskdet_test_records.mdr";
  CHECK(write_records(items, path) == 3);
  auto back = read_records(path);
  CHECK(back == items);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_records(path), std::runtime_error);
}

TEST_CASE("corruption is reported with the record index") {
  Rng rng(10);
  std::vector<std::vector<std::uint8_t>> payloads;
  for (int i = 0; i < 3; ++i) payloads.push_back(encode_item(make_item(rng, i)));
  auto file = encode_record_file(payloads);

  // Locate record 1 and flip one byte of its CRC.
  std::size_t off = 4 + 8 + payloads[0].size() + 4;
  const std::size_t crc_at = off + 8 + payloads[1].size();
  auto bad = file;
  bad[crc_at] ^= 0x01;
  std::string err = decode_error(bad);
  CHECK(err.find("record 1") != std::string::npos);
  CHECK(err.find("CRC") != std::string::npos);

  // Flipping any single payload byte of record 2 is caught.
  const std::size_t p2 = crc_at + 4 + 8;
  for (std::size_t i = 0; i < payloads[2].size(); i += 7) {
    auto flip = file;
    flip[p2 + i] ^= 0x80;
    CHECK(decode_error(flip).find("record 2") != std::string::npos);
  }

  auto truncated = file;
  truncated.resize(file.size() - 2);
  CHECK(decode_error(truncated).find("record 2") != std::string::npos);

  auto magic = file;
  magic[0] = 'X';
  CHECK_FALSE(decode_error(magic).empty());
}

TEST_CASE("decode_item rejects short payloads") {
  std::vector<std::uint8_t> tiny = {1, 0};
  CHECK_THROWS_AS(decode_item(tiny), std::invalid_argument);
  std::vector<std::uint8_t> lying = {100, 0, 0, 0, '{', '}'};
  CHECK_THROWS_AS(decode_item(lying), std::invalid_argument);
}
