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
#ifndef GAZEATTEND_DISTILL_HPP_
#define GAZEATTEND_DISTILL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazeattend/denseinfer.hpp"
#include "gazeattend/gridmap.hpp"
#include "gazeattend/manifest.hpp"

namespace gazeattend {

inline constexpr double kKlEpsilon = 1e-8;
inline constexpr int kDefaultDistillFrames = 1659;

// Sum_i p_i * ln(p_i / q_i) with 0 * ln(0/.) = 0 and q clamped below by
// 1e-8. Both arguments must be normalized distributions of equal length.
double kl_divergence(std::span<const float> p, std::span<const float> q);

struct DistillConfig {
  int num_frames = kDefaultDistillFrames;
  int batch_size = 1;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int max_epochs = 20;
  int patience = 3;
  std::uint64_t seed = 0;
  // true: match the student to the teacher distribution (teacher as the
  // first KL argument). false: reverse direction.
  bool teacher_first = true;

  void validate() const;
};

// Up to n uniformly sampled train-split frames whose attended class is not
// "other". Saturates with a warning flag when fewer qualify.
struct DistillSelection {
  std::vector<std::string> frame_ids;
  bool saturated = false;
};
DistillSelection select_distill_frames(const DatasetManifest& manifest, int n,
                                       std::uint64_t seed);

// Teacher targets for one frame each, as stored probability maps.
struct TeacherSet {
  std::vector<std::pair<std::string, ClassProbMap>> maps;
};
TeacherSet load_teacher_set(const std::filesystem::path& dir);

struct DistillResult {
  DenseModel model;  // finetuned copy; the input model is untouched
  double initial_kl = 0.0;
  double best_kl = 0.0;
  int best_epoch = 0;  // 0 = initialization
  std::vector<double> epoch_kl;  // mean KL after each epoch
};

// Finetunes a copy of the dense model so each cell's distribution matches
// the teacher's, minimizing mean KL over frames and cells. Early-stops on the
// distillation-set mean KL. Teacher geometry must match the model's output
// grid for every frame.
DistillResult finetune_kl(const DenseModel& model, const TeacherSet& teachers,
                          const DatasetManifest& manifest,
                          const DistillConfig& cfg, int jobs = 1);

// Mean cell-wise KL of the model against the teacher maps. This is the
// metric finetune_kl reports per epoch.
double mean_teacher_kl(const DenseModel& model, const TeacherSet& teachers,
                       const DatasetManifest& manifest, bool teacher_first,
                       int jobs = 1);

}  // namespace gazeattend

#endif  // GAZEATTEND_DISTILL_HPP_
