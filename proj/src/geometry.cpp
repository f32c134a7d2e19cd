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

#include "gazeloop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazeloop {

double FrameSize::diagonal() const { return std::hypot(width, height); }

void require_valid(const BoundingBox& box, const char* what) {
  if (!(std::isfinite(box.x_min) && std::isfinite(box.y_min) && std::isfinite(box.x_max) &&
        std::isfinite(box.y_max)) ||
      !box.valid()) {
    throw std::invalid_argument(std::string(what) + " must satisfy x_min < x_max, y_min < y_max");
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<BoundingBox> clamp_to_frame(const BoundingBox& box, FrameSize frame,
                                          double min_extent) {
  BoundingBox out{std::clamp(box.x_min, 0.0, frame.width), std::clamp(box.y_min, 0.0, frame.height),
                  std::clamp(box.x_max, 0.0, frame.width), std::clamp(box.y_max, 0.0, frame.height)};
  if (out.width() < min_extent || out.height() < min_extent) return std::nullopt;
  return out;
}

std::optional<std::size_t> smallest_containing(std::span<const LabeledBox> boxes, double x,
                                               double y) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!boxes[i].box.contains(x, y)) continue;
    if (!best || boxes[i].box.area() < boxes[*best].box.area()) best = i;
  }
  return best;
}

}  // namespace gazeloop
