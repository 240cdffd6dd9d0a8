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
#ifndef GAZEATTEND_TYPES_HPP_
#define GAZEATTEND_TYPES_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace gazeattend {

// Axis-aligned pixel box. (x, y) is the top-left corner; the box covers
// [x, x + w) x [y, y + h), so w and h are in pixels and must be >= 1.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }

  bool contains(double px, double py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }

  bool inside_frame(int frame_w, int frame_h) const {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= frame_w &&
           y + h <= frame_h;
  }

  bool operator==(const BoundingBox& o) const {
    return x == o.x && y == o.y && w == o.w && h == o.h;
  }
};

// 2D gaze point in pixel coordinates, origin at the top-left of the frame.
// A gaze is valid for a frame iff it lies in the half-open box
// [0, frame_w) x [0, frame_h).
struct GazeSample {
  double x = 0.0;
  double y = 0.0;

  bool valid_in(int frame_w, int frame_h) const {
    return std::isfinite(x) && std::isfinite(y) && x >= 0.0 && y >= 0.0 &&
           x < frame_w && y < frame_h;
  }

  // Pixel under the gaze, for mask lookups.
  int pixel_x(int frame_w) const {
    int px = static_cast<int>(std::floor(x));
    return px < 0 ? 0 : (px >= frame_w ? frame_w - 1 : px);
  }
  int pixel_y(int frame_h) const {
    int py = static_cast<int>(std::floor(y));
    return py < 0 ? 0 : (py >= frame_h ? frame_h - 1 : py);
  }
};

// One attended-object prediction.
struct Detection {
  int class_id = 0;
  BoundingBox box;
  double score = 0.0;  // in [0, 1]
};

// All detections emitted for one frame. The weak pipelines emit at most one
// detection per frame; externally supplied detector output may carry many.
struct FrameDetections {
  std::string frame_id;
  std::vector<Detection> detections;
};

// Per-class probability vector. Helpers below check the normalization
// contract (entries >= 0, sum == 1 within 1e-5).
using ProbVector = std::vector<float>;

bool is_normalized(const ProbVector& p, double tol = 1e-5);
int argmax(const ProbVector& p);

}  // namespace gazeattend

#endif  // GAZEATTEND_TYPES_HPP_
