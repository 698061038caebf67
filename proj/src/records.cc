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

#include "maskdet/records.h"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <iterator>
#include <stdexcept>
#include <string>

#include "maskdet/image_io.h"

namespace maskdet {
namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_record_file(
    const std::vector<std::vector<std::uint8_t>>& payloads) {
  std::vector<std::uint8_t> out(std::begin(kRecordMagic), std::end(kRecordMagic));
  for (const auto& p : payloads) {
    put_le(out, p.size(), 8);
    out.insert(out.end(), p.begin(), p.end());
    put_le(out, crc32_ieee(p), 4);
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> decode_record_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kRecordMagic, 4) != 0) {
    throw std::invalid_argument("records: bad magic");
  }
  std::vector<std::vector<std::uint8_t>> payloads;
  std::size_t pos = 4;
  for (std::size_t index = 0; pos < bytes.size(); ++index) {
    const std::string where = "records: record " + std::to_string(index) + ": ";
    if (bytes.size() - pos < 8) throw std::invalid_argument(where + "truncated length");
    const std::uint64_t len = get_le(bytes.data() + pos, 8);
    pos += 8;
    if (len > bytes.size() - pos || bytes.size() - pos - len < 4) {
      throw std::invalid_argument(where + "truncated payload");
    }
    std::span<const std::uint8_t> payload = bytes.subspan(pos, len);
    pos += len;
    const auto stored = static_cast<std::uint32_t>(get_le(bytes.data() + pos, 4));
    pos += 4;
    if (stored != crc32_ieee(payload)) throw std::invalid_argument(where + "CRC mismatch");
    payloads.emplace_back(payload.begin(), payload.end());
  }
  return payloads;
}

std::vector<std::uint8_t> encode_item(const RecordItem& item) {
  const std::string text = nlohmann::json(item.annotation).dump();
  std::vector<std::uint8_t> out;
  out.reserve(4 + text.size() + item.image.size());
  put_le(out, text.size(), 4);
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), item.image.begin(), item.image.end());
  return out;
}

RecordItem decode_item(std::span<const std::uint8_t> payload) {
  if (payload.size() < 4) throw std::invalid_argument("record payload: truncated header");
  const std::uint64_t len = get_le(payload.data(), 4);
  if (len > payload.size() - 4) throw std::invalid_argument("record payload: truncated JSON");
  RecordItem item;
  try {
    item.annotation = nlohmann::json::parse(payload.begin() + 4, payload.begin() + 4 + len)
                          .get<Annotation>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("record payload: bad annotation JSON: ") + e.what());
  }
  item.image.assign(payload.begin() + 4 + len, payload.end());
  return item;
}

std::size_t write_records(const std::vector<RecordItem>& items, const std::filesystem::path& path) {
  std::vector<std::vector<std::uint8_t>> payloads;
  payloads.reserve(items.size());
  for (const auto& item : items) payloads.push_back(encode_item(item));
  write_file(path, encode_record_file(payloads));
  return items.size();
}

std::vector<RecordItem> read_records(const std::filesystem::path& path) {
  const auto payloads = decode_record_file(read_file(path));
  std::vector<RecordItem> items;
  items.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    try {
      items.push_back(decode_item(payloads[i]));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("records: record " + std::to_string(i) + ": " + e.what());
    }
  }
  return items;
}

}  // namespace maskdet
