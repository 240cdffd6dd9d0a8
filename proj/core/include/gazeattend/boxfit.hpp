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
#ifndef GAZEATTEND_BOXFIT_HPP_
#define GAZEATTEND_BOXFIT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "gazeattend/gridmap.hpp"
#include "gazeattend/types.hpp"

namespace gazeattend {

inline constexpr int kGazeNeighborhood = 100;

// Most frequent class among the pixels of the neighborhood window centered
// on the gaze (clamped inside the frame; ties go to the smallest class
// index). Returns nullopt when the mode is the "other" class. A literal
// integer median over the window is available for reproduction studies.
enum class NeighborhoodStat { kMode, kMedian };
std::optional<int> select_attended_class(
    const SegmentationMask& mask, const GazeSample& gaze, int other_index,
    int neighborhood = kGazeNeighborhood,
    NeighborhoodStat stat = NeighborhoodStat::kMode);

// Pixels of one 4-connected component, packed as y * width + x.
using PixelSet = std::vector<std::uint32_t>;

// The class_id component containing the gaze pixel, or - when the gaze
// pixel carries another class - the component whose nearest pixel is
// closest (Euclidean; ties by smaller minimum row, then column). Throws
// DataError when the class is absent from the mask.
PixelSet extract_component(const SegmentationMask& mask, int class_id,
                           const GazeSample& gaze);

// Tight axis-aligned bounds of a non-empty component.
BoundingBox fit_box(const PixelSet& component, int mask_width);

// Full mask-to-detection path: upsample, pick the attended class around the
// gaze, take its connected component, fit the box. Score is the mean
// upsampled probability of the chosen class over the component pixels.
std::optional<Detection> detect_attended(
    const ClassProbMap& map, const GazeSample& gaze, int other_index,
    int neighborhood = kGazeNeighborhood,
    NeighborhoodStat stat = NeighborhoodStat::kMode);

// Supervised-baseline selection over externally produced detections: the
// smallest-area box containing the gaze point (ties by higher score).
std::optional<Detection> select_gaze_box(const std::vector<Detection>& dets,
                                         const GazeSample& gaze);

// Detections interchange: JSON lines, one object per frame -
// {"frame_id": ..., "detections": [{"class", "box": [x, y, w, h], "score"}]}.
void save_detections_jsonl(const std::vector<FrameDetections>& dets,
                           const std::filesystem::path& path);
std::vector<FrameDetections> load_detections_jsonl(
    const std::filesystem::path& path);

}  // namespace gazeattend

#endif  // GAZEATTEND_BOXFIT_HPP_
