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

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "maskdet/image_io.h"
#include "maskdet/postprocess.h"

namespace maskdet {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kMaskColor = {0, 200, 0};
inline constexpr Rgb kNoMaskColor = {220, 0, 0};
inline constexpr Rgb kOtherColor = {0, 90, 220};
inline constexpr Rgb kTextColor = {255, 255, 255};
inline constexpr int kBoxThickness = 2;
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

Rgb class_color(const std::string& class_name);

// "<name> <score with 2 decimals>".
std::string detection_label(const Detection& d);

// Pixel width/height of `text` in the built-in 5x7 font (1 px spacing).
int text_width(const std::string& text);

// Draws `text` with its top-left corner at (x, y); pixels outside the image
// are skipped. Characters without a glyph render as '?'.
void draw_text(Image& image, int x, int y, const std::string& text, Rgb color);

// Fills [x0, x1] x [y0, y1] (inclusive), clipped to the image.
void fill_rect(Image& image, int x0, int y0, int x1, int y1, Rgb color);

// 2-px box per detection in the class color, and a filled label strip
// above the box (moved inside the frame when it would leave it).
Image render_annotations(const Image& frame, std::span<const Detection> detections);

}  // namespace maskdet
