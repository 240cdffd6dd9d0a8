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
#ifndef GAZEATTEND_METRICS_HPP_
#define GAZEATTEND_METRICS_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazeattend/classifier.hpp"
#include "gazeattend/manifest.hpp"
#include "gazeattend/types.hpp"

namespace gazeattend {

double iou(const BoundingBox& a, const BoundingBox& b);

// At most one attended ground-truth box per frame; frames attending "other"
// carry none and every detection there counts as a false positive.
struct GroundTruthBox {
  int class_id = 0;
  BoundingBox box;
};
using AttendedGts = std::map<std::string, GroundTruthBox>;

// Builds frame_id -> attended box for a split. The attended box is the
// manifest box of the attended class (the one containing the gaze when
// several match). Frames without a matching box are skipped.
AttendedGts attended_gt_from_manifest(const DatasetManifest& m,
                                      const std::string& split);

// Score-descending sweep with 101-point interpolated precision-recall area.
// A detection is a true positive iff its frame's ground truth has the same
// class and IoU >= threshold. Returns nullopt when the class has no ground
// truth. Throws DataError on duplicate frame ids.
std::optional<double> average_precision(const std::vector<FrameDetections>& dets,
                                        const AttendedGts& gts, int class_id,
                                        double iou_threshold);

struct ClassAp {
  double ap = 0.0;    // mean over IoU thresholds 0.50:0.05:0.95
  double ap50 = 0.0;  // at threshold 0.50
};

struct EvalReport {
  std::map<int, ClassAp> per_class;  // classes with ground truth only
  double map = 0.0;
  double map50 = 0.0;
  int num_frames = 0;
  std::map<std::string, double> timing;  // method -> mean seconds per frame
};

// mAP over classes excluding "other"; classes without ground truth are
// left out of the mean. Throws DataError when gts is empty.
EvalReport map_metrics(const std::vector<FrameDetections>& dets,
                       const AttendedGts& gts, int num_classes,
                       int other_index);

void save_report_json(const EvalReport& report,
                      const std::filesystem::path& path);
EvalReport load_report_json(const std::filesystem::path& path);

// Per-class AP/AP50 table: one column per class plus an "All" column.
void save_per_class_csv(const EvalReport& report,
                        const std::filesystem::path& path);

// Mean wall seconds per frame for each method over `repetitions` passes of
// all frames, after `warmup` discarded passes (at least one).
struct TimedMethod {
  std::string name;
  std::function<void(std::size_t frame_index)> run;
};
std::map<std::string, double> timing_benchmark(
    const std::vector<TimedMethod>& methods, std::size_t num_frames,
    int repetitions, int warmup = 1);

// Patch-classifier confusion matrix and summary, plus a figure-ready CSV.
ClassifierEval confusion_report(const PatchClassifier& model,
                                const DatasetManifest& manifest,
                                const std::string& split,
                                const std::filesystem::path& csv_path,
                                int jobs = 1);
void save_confusion_csv(const ClassifierEval& eval,
                        const std::vector<std::string>& class_names,
                        const std::filesystem::path& path);

}  // namespace gazeattend

#endif  // GAZEATTEND_METRICS_HPP_
