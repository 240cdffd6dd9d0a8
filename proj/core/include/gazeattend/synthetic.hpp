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
#ifndef GAZEATTEND_SYNTHETIC_HPP_
#define GAZEATTEND_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "gazeattend/manifest.hpp"
#include "gazeattend/patches.hpp"

namespace gazeattend {

// Desk-scale scene generator: flat-shaded, non-overlapping shapes on a noisy
// background, one attended object per frame with the gaze placed inside it
// (or on background for "other" frames). Pure function of (config, seed).
struct SyntheticSceneConfig {
  int width = 640;
  int height = 384;
  int num_classes = 5;  // object classes, excluding the reserved "other"
  int min_objects = 2;  // objects per frame, distinct classes
  int max_objects = 3;
  bool rectangles = true;
  bool ellipses = true;
  bool solid_fill = true;  // false adds per-class stripe/checker patterns
  std::uint64_t texture_seed = 0;  // drives per-class colors and patterns
  int min_object_side = 96;
  int max_object_side = 176;
  int min_gap = 24;  // pixels between object boxes and to the frame edge
  double gaze_jitter = 8.0;  // pixels around the object center
  double other_fraction = 1.0 / 6.0;  // frames attending the background
  int patch_side = kDefaultPatchSide;  // objects must satisfy
                                       // area >= (patch_side / 4)^2
  bool emit_masks = false;  // also write per-frame class-index masks
  std::map<std::string, int> frames_per_split = {{"train", 200}, {"test", 50}};

  void validate() const;  // throws ConfigError
};

SyntheticSceneConfig synthetic_config_from_json_file(
    const std::filesystem::path& path);

// Writes images/, manifest.json, gaze.csv and (optionally) masks/ under
// out_dir, and returns the manifest. Throws DataError if a non-overlapping
// layout cannot be found within bounded retries.
DatasetManifest generate_synthetic(const SyntheticSceneConfig& cfg,
                                   std::uint64_t seed,
                                   const std::filesystem::path& out_dir);

}  // namespace gazeattend

#endif  // GAZEATTEND_SYNTHETIC_HPP_
