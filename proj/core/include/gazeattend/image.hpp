/* Copyright 2026 The GazeAttend Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef GAZEATTEND_IMAGE_HPP_
#define GAZEATTEND_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gazeattend {

// 8-bit RGB raster, row-major, interleaved channels.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // height * width * 3

  static Image filled(int w, int h, std::uint8_t r, std::uint8_t g,
                      std::uint8_t b);

  std::uint8_t* px(int x, int y) { return rgb.data() + 3 * (y * width + x); }
  const std::uint8_t* px(int x, int y) const {
    return rgb.data() + 3 * (y * width + x);
  }
};

Image load_image(const std::filesystem::path& path);
void save_image_png(const Image& img, const std::filesystem::path& path);

// Single-channel 8-bit rasters back the class-index mask files.
std::vector<std::uint8_t> load_gray_png(const std::filesystem::path& path,
                                        int* width, int* height);
void save_gray_png(const std::vector<std::uint8_t>& data, int width, int height,
                   const std::filesystem::path& path);

}  // namespace gazeattend

#endif  // GAZEATTEND_IMAGE_HPP_
