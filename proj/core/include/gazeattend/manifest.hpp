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
#ifndef GAZEATTEND_MANIFEST_HPP_
#define GAZEATTEND_MANIFEST_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gazeattend/types.hpp"

namespace gazeattend {

// One frame: its image, the gaze point, and the frame-level attended class.
// Ground-truth boxes are present only on evaluation manifests; they are never
// consumed at training time.
struct FrameRecord {
  std::string id;
  std::string image_path;  // relative to the manifest directory, or absolute
  GazeSample gaze;
  int attended_class = 0;
  std::vector<std::pair<int, BoundingBox>> gt_boxes;
};

// Declarative dataset listing. The manifest is the single source of truth
// for class names, frame geometry, and splits.
//
// On-disk format (JSON, one document):
//   {"name": ..., "classes": [...], "frame_size": [W, H],
//    "splits": {"train": [ids], "test": [ids]},
//    "frames": [{"id", "image", "gaze": [x, y], "attended": class_index,
//                "boxes": [[class, x, y, w, h], ...]?}]}
struct DatasetManifest {
  std::string name;
  std::vector<std::string> class_names;  // contains exactly one "other"
  int frame_width = 0;
  int frame_height = 0;
  std::vector<FrameRecord> frames;
  std::map<std::string, std::vector<std::string>> splits;

  // Directory the manifest was loaded from; resolves relative image paths.
  // Not serialized.
  std::filesystem::path base_dir;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  int other_index() const;

  const FrameRecord* find_frame(const std::string& id) const;
  std::vector<const FrameRecord*> split_frames(const std::string& split) const;
  std::filesystem::path resolve_image(const FrameRecord& f) const;

  // Checks all structural invariants; throws DataError on violation.
  void validate() const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

// Drops every frame whose gaze falls outside [0, W) x [0, H), along with its
// split entries.
struct GazeFilterResult {
  DatasetManifest manifest;
  int removed = 0;
};
GazeFilterResult filter_valid_gaze(const DatasetManifest& m);

// Optional gaze-log interchange: CSV with header "frame_id,x,y,label".
struct GazeCsvRow {
  std::string frame_id;
  double x = 0.0;
  double y = 0.0;
  int label = 0;
};
std::vector<GazeCsvRow> load_gaze_csv(const std::filesystem::path& path);
void save_gaze_csv(const std::vector<GazeCsvRow>& rows,
                   const std::filesystem::path& path);
// Overwrites gaze and attended class of matching frames; unknown ids error.
void apply_gaze_csv(DatasetManifest& m, const std::vector<GazeCsvRow>& rows);

}  // namespace gazeattend

#endif  // GAZEATTEND_MANIFEST_HPP_
