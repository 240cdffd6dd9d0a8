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
#include "gazeattend/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "gazeattend/errors.hpp"

namespace gazeattend {

Image Image::filled(int w, int h, std::uint8_t r, std::uint8_t g,
                    std::uint8_t b) {
  Image img;
  img.width = w;
  img.height = h;
  img.rgb.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
    img.rgb[i] = r;
    img.rgb[i + 1] = g;
    img.rgb[i + 2] = b;
  }
  return img;
}

Image load_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw DataError("cannot read image: " + path.string());
  }
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image img;
  img.width = rgb.cols;
  img.height = rgb.rows;
  img.rgb.assign(rgb.data, rgb.data + static_cast<std::size_t>(rgb.total()) * 3);
  return img;
}

void save_image_png(const Image& img, const std::filesystem::path& path) {
  cv::Mat rgb(img.height, img.width, CV_8UC3,
              const_cast<std::uint8_t*>(img.rgb.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) {
    throw DataError("cannot write image: " + path.string());
  }
}

std::vector<std::uint8_t> load_gray_png(const std::filesystem::path& path,
                                        int* width, int* height) {
  cv::Mat gray = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (gray.empty()) {
    throw DataError("cannot read mask: " + path.string());
  }
  *width = gray.cols;
  *height = gray.rows;
  return {gray.data, gray.data + gray.total()};
}

void save_gray_png(const std::vector<std::uint8_t>& data, int width, int height,
                   const std::filesystem::path& path) {
  cv::Mat gray(height, width, CV_8UC1, const_cast<std::uint8_t*>(data.data()));
  if (!cv::imwrite(path.string(), gray)) {
    throw DataError("cannot write mask: " + path.string());
  }
}

}  // namespace gazeattend
