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
#include <vector>

#include "maskdet/dataset.h"

namespace maskdet {

// File: "MDR1" followed by records. Record: u64 LE payload length, payload,
// u32 LE CRC32 (IEEE) of the payload. Payload: u32 LE JSON length, the
// annotation as JSON, then the raw image bytes (PPM P6).
inline constexpr char kRecordMagic[4] = {'M', 'D', 'R', '1'};

struct RecordItem {
  Annotation annotation;
  std::vector<std::uint8_t> image;

  friend bool operator==(const RecordItem&, const RecordItem&) = default;
};

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes);

// Framing only: arbitrary payloads.
std::vector<std::uint8_t> encode_record_file(const std::vector<std::vector<std::uint8_t>>& payloads);
// Throws std::invalid_argument naming the record index on bad magic, CRC
// mismatch or truncation.
std::vector<std::vector<std::uint8_t>> decode_record_file(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_item(const RecordItem& item);
RecordItem decode_item(std::span<const std::uint8_t> payload);

std::size_t write_records(const std::vector<RecordItem>& items, const std::filesystem::path& path);
std::vector<RecordItem> read_records(const std::filesystem::path& path);

}  // namespace maskdet
