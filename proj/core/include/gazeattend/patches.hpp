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
#ifndef GAZEATTEND_PATCHES_HPP_
#define GAZEATTEND_PATCHES_HPP_

#include "gazeattend/image.hpp"
#include "gazeattend/manifest.hpp"
#include "gazeattend/types.hpp"

namespace gazeattend {

inline constexpr int kDefaultPatchSide = 300;

// Square crop labeled with the frame-level attended class.
struct Patch {
  Image pixels;  // side x side
  int label = 0;
  int x0 = 0;  // origin in the source frame
  int y0 = 0;
};

// Top-left corner of the side x side window centered on the gaze, shifted
// (not padded) to lie fully inside a W x H frame. For interior gaze points
// the window center stays within half a pixel of the gaze.
struct WindowOrigin {
  int x0 = 0;
  int y0 = 0;
};
WindowOrigin clamped_window(const GazeSample& gaze, int side, int frame_w,
                            int frame_h);

// Crops the patch around the frame's gaze from an already-loaded image.
Patch crop_gaze_patch(const Image& img, const FrameRecord& frame,
                      int side = kDefaultPatchSide);

// Loads the frame image from disk, then crops.
Patch sample_gaze_patch(const DatasetManifest& m, const FrameRecord& frame,
                        int side = kDefaultPatchSide);

}  // namespace gazeattend

#endif  // GAZEATTEND_PATCHES_HPP_
