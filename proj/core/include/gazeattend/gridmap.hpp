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
#ifndef GAZEATTEND_GRIDMAP_HPP_
#define GAZEATTEND_GRIDMAP_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gazeattend/types.hpp"

namespace gazeattend {

// Coarse grid over a frame: rows = ceil(H / stride), cols = ceil(W / stride).
// Cell (r, c) has nominal center ((c + 0.5) * stride, (r + 0.5) * stride);
// the associated window is shifted to fit inside the frame.
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  int stride = 0;
  int window = 0;
  int frame_w = 0;
  int frame_h = 0;

  static GridGeometry make(int frame_w, int frame_h, int stride, int window);

  // Top-left of the clamped window for a cell.
  std::pair<int, int> cell_window_origin(int r, int c) const;

  // Cell owning a pixel (floor division; every cell owns at least one pixel).
  int row_of(int y) const { return y / stride; }
  int col_of(int x) const { return x / stride; }

  bool operator==(const GridGeometry& o) const {
    return rows == o.rows && cols == o.cols && stride == o.stride &&
           window == o.window && frame_w == o.frame_w && frame_h == o.frame_h;
  }
};

// Per-cell class probability distributions.
struct ClassProbMap {
  GridGeometry geom;
  int num_classes = 0;
  std::vector<float> probs;  // rows * cols * C, cell-major

  ClassProbMap() = default;
  ClassProbMap(const GridGeometry& g, int nc)
      : geom(g),
        num_classes(nc),
        probs(static_cast<std::size_t>(g.rows) * g.cols * nc, 0.0f) {}

  float* cell(int r, int c) {
    return probs.data() +
           (static_cast<std::size_t>(r) * geom.cols + c) * num_classes;
  }
  const float* cell(int r, int c) const {
    return probs.data() +
           (static_cast<std::size_t>(r) * geom.cols + c) * num_classes;
  }
  int cell_argmax(int r, int c) const;
};

// Frame-resolution class-index map.
struct SegmentationMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;  // height * width

  SegmentationMask() = default;
  SegmentationMask(int w, int h)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

// Per-cell argmax expanded to frame resolution (nearest neighbor). The label
// set of the mask equals the set of per-cell argmaxes.
SegmentationMask upsample_to_mask(const ClassProbMap& map);

// Per-pixel class probabilities at frame resolution, pixel-major (C floats
// per pixel). Nearest-neighbor by default; bilinear interpolation of cell
// centers is intended for visualization.
std::vector<float> upsample_probs(const ClassProbMap& map,
                                  bool bilinear = false);

// Coarse-map container: "CPM1" magic, little-endian u32 JSON header length,
// JSON {rows, cols, num_classes, stride, window, frame_size}, then
// rows*cols*C float32 probabilities.
void save_prob_map(const ClassProbMap& map, const std::filesystem::path& path);
ClassProbMap load_prob_map(const std::filesystem::path& path);

// Mask file: single-channel 8-bit PNG, pixel value = class index (C <= 256).
void save_mask(const SegmentationMask& mask, const std::filesystem::path& path);
SegmentationMask load_mask(const std::filesystem::path& path);

}  // namespace gazeattend

#endif  // GAZEATTEND_GRIDMAP_HPP_
