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

#include <optional>
#include <span>
#include <string>

namespace gazeloop {

/// Axis-aligned box in pixel coordinates.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  bool valid() const { return x_min < x_max && y_min < y_max; }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  BoundingBox translated(double dx, double dy) const {
    return {x_min + dx, y_min + dy, x_max + dx, y_max + dy};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct FrameSize {
  double width = 0.0;
  double height = 0.0;

  double diagonal() const;
  friend bool operator==(const FrameSize&, const FrameSize&) = default;
};

/// Throws std::invalid_argument unless x_min < x_max and y_min < y_max.
void require_valid(const BoundingBox& box, const char* what = "box");

/// Intersection over union; 0 when the boxes do not overlap.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Intersects `box` with the frame. Returns nullopt when less than
/// `min_extent` pixels remain along either axis.
std::optional<BoundingBox> clamp_to_frame(const BoundingBox& box, FrameSize frame,
                                          double min_extent = 1.0);

/// A box paired with a class label.
struct LabeledBox {
  BoundingBox box;
  std::string label;
};

/// Index of the smallest-area box containing (x, y), or nullopt. Earlier
/// entries win exact area ties.
std::optional<std::size_t> smallest_containing(std::span<const LabeledBox> boxes,
                                               double x, double y);

inline constexpr const char* kBackground = "background";

}  // namespace gazeloop
