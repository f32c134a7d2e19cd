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

#include "gazeloop/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazeloop {

namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 8> kPalette{{
    {{90, 90, 90}},
    {{230, 159, 0}},
    {{86, 180, 233}},
    {{0, 158, 115}},
    {{240, 228, 66}},
    {{0, 114, 178}},
    {{213, 94, 0}},
    {{204, 121, 167}},
}};

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

}  // namespace

std::array<std::uint8_t, 3> class_color(std::size_t index) {
  return kPalette[index % kPalette.size()];
}

RgbImage render_frame(const Frame& frame, FrameSize size, std::span<const std::string> labels) {
  RgbImage img;
  img.width = static_cast<std::size_t>(std::lround(size.width));
  img.height = static_cast<std::size_t>(std::lround(size.height));
  img.pixels.assign(img.width * img.height * 3, 40);

  std::vector<const GtObject*> order;
  for (const auto& o : frame.objects) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(),
                   [](const GtObject* a, const GtObject* b) { return a->box.area() > b->box.area(); });
  for (const GtObject* o : order) {
    const auto it = std::find(labels.begin(), labels.end(), o->class_label);
    const std::array<std::uint8_t, 3> color =
        it == labels.end() ? std::array<std::uint8_t, 3>{255, 255, 255}
                           : class_color(static_cast<std::size_t>(it - labels.begin()));
    const auto clampi = [](double v, std::size_t hi) {
      return static_cast<std::size_t>(std::clamp(std::floor(v), 0.0, static_cast<double>(hi)));
    };
    const std::size_t x0 = clampi(o->box.x_min, img.width), x1 = clampi(o->box.x_max, img.width);
    const std::size_t y0 = clampi(o->box.y_min, img.height), y1 = clampi(o->box.y_max, img.height);
    for (std::size_t y = y0; y < y1; ++y)
      for (std::size_t x = x0; x < x1; ++x)
        std::copy(color.begin(), color.end(), img.pixels.begin() + 3 * (y * img.width + x));
  }
  return img;
}

std::string encode_png(const RgbImage& image) {
  if (image.pixels.size() != image.width * image.height * 3 || image.width == 0 || image.height == 0) {
    throw std::invalid_argument("image buffer does not match its dimensions");
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw std::runtime_error("png encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + 3 * y * image.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace gazeloop
