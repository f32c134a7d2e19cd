// Copyright 2026 The Gazeloop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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
#include <vector>

#include "gazeloop/scene.hpp"

namespace gazeloop {

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

/// Fill colour for label position `index` in the session label list.
std::array<std::uint8_t, 3> class_color(std::size_t index);

/// Ground-truth rectangles filled with class colours on a grey canvas,
/// larger boxes first so nested objects stay visible. Labels missing from
/// `labels` are drawn white.
RgbImage render_frame(const Frame& frame, FrameSize size, std::span<const std::string> labels);

/// Lossless PNG bytes. Throws std::runtime_error if the encoder fails.
std::string encode_png(const RgbImage& image);

}  // namespace gazeloop
