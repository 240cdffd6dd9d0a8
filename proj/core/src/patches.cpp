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
#include "gazeattend/patches.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gazeattend/errors.hpp"

namespace gazeattend {

WindowOrigin clamped_window(const GazeSample& gaze, int side, int frame_w,
                            int frame_h) {
  if (side <= 0) {
    throw ConfigError("window side must be positive");
  }
  if (side > frame_w || side > frame_h) {
    throw DataError("window side " + std::to_string(side) +
                    " exceeds frame " + std::to_string(frame_w) + "x" +
                    std::to_string(frame_h));
  }
  if (!gaze.valid_in(frame_w, frame_h)) {
    throw DataError("gaze outside frame bounds");
  }
  int cx = static_cast<int>(std::lround(gaze.x));
  int cy = static_cast<int>(std::lround(gaze.y));
  WindowOrigin o;
  o.x0 = std::clamp(cx - side / 2, 0, frame_w - side);
  o.y0 = std::clamp(cy - side / 2, 0, frame_h - side);
  return o;
}

Patch crop_gaze_patch(const Image& img, const FrameRecord& frame, int side) {
  WindowOrigin o = clamped_window(frame.gaze, side, img.width, img.height);
  Patch p;
  p.label = frame.attended_class;
  p.x0 = o.x0;
  p.y0 = o.y0;
  p.pixels.width = side;
  p.pixels.height = side;
  p.pixels.rgb.resize(static_cast<std::size_t>(side) * side * 3);
  for (int y = 0; y < side; ++y) {
    std::memcpy(p.pixels.rgb.data() + static_cast<std::size_t>(y) * side * 3,
                img.px(o.x0, o.y0 + y), static_cast<std::size_t>(side) * 3);
  }
  return p;
}

Patch sample_gaze_patch(const DatasetManifest& m, const FrameRecord& frame,
                        int side) {
  Image img = load_image(m.resolve_image(frame));
  if (img.width != m.frame_width || img.height != m.frame_height) {
    throw DataError("frame " + frame.id + ": image size " +
                    std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " disagrees with manifest");
  }
  return crop_gaze_patch(img, frame, side);
}

}  // namespace gazeattend
