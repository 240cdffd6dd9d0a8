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
#ifndef GAZEATTEND_CLASSIFIER_HPP_
#define GAZEATTEND_CLASSIFIER_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gazeattend/manifest.hpp"
#include "gazeattend/nn/backbone.hpp"
#include "gazeattend/patches.hpp"
#include "gazeattend/types.hpp"

namespace gazeattend {

// Architecture contract for everything downstream: convolutional features,
// then a global spatial average, then one linear layer to class logits.
struct ClassifierSpec {
  std::string backbone_id = "tiny";  // "tiny" | "resnet18"
  int num_classes = 2;
  int input_side = 300;
  int total_stride = 32;
};

struct TrainConfig {
  int batch_size = 8;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int max_epochs = 30;
  int patience = 5;  // early stop on the held-out patch loss
  std::uint64_t seed = 0;
  double holdout_fraction = 0.1;
  bool class_weighting = false;
  bool horizontal_flip = false;

  void validate() const;  // throws ConfigError
};

// Per-channel standardization constants, in [0, 1] units. Stored in the
// model artifact so every inference path reuses them bit-identically.
struct Preprocessing {
  std::array<float, 3> mean = {0.5f, 0.5f, 0.5f};
  std::array<float, 3> stdev = {0.25f, 0.25f, 0.25f};
};

struct TrainLog {
  double first_epoch_loss = 0.0;
  double best_holdout_loss = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  double final_train_accuracy = 0.0;
};

// Scales to [0, 1], standardizes per channel, then zero-pads right/bottom to
// a stride multiple (padding equals the channel mean in pixel space).
nn::Tensor standardize_image(const Image& img, const Preprocessing& pre,
                             int stride_multiple);

// Trained gaze-patch classifier artifact.
class PatchClassifier {
 public:
  PatchClassifier() = default;
  PatchClassifier(const ClassifierSpec& spec,
                  std::vector<std::string> class_names);
  PatchClassifier(const PatchClassifier& o);
  PatchClassifier& operator=(const PatchClassifier& o);
  PatchClassifier(PatchClassifier&&) = default;
  PatchClassifier& operator=(PatchClassifier&&) = default;

  const ClassifierSpec& spec() const { return spec_; }
  const Preprocessing& preprocessing() const { return preproc_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const nn::Backbone& backbone() const { return *backbone_; }
  nn::Backbone& backbone() { return *backbone_; }
  const nn::Linear& head() const { return head_; }
  nn::Linear& head() { return head_; }
  const TrainLog& train_log() const { return train_log_; }
  std::uint64_t train_seed() const { return train_seed_; }

  void set_preprocessing(const Preprocessing& p) { preproc_ = p; }
  void set_train_log(const TrainLog& l) { train_log_ = l; }
  void set_train_seed(std::uint64_t s) { train_seed_ = s; }

  // Scales to [0, 1], standardizes per channel, pads to a stride multiple.
  nn::Tensor standardize(const Image& img) const;

  // Softmax class distribution for an input_side x input_side patch.
  ProbVector classify(const Image& patch) const;
  ProbVector classify(const Patch& patch) const { return classify(patch.pixels); }

  std::vector<nn::ParamRef> params();

  void save(const std::filesystem::path& dir) const;
  static PatchClassifier load(const std::filesystem::path& dir);

 private:
  ClassifierSpec spec_;
  Preprocessing preproc_;
  std::vector<std::string> class_names_;
  std::unique_ptr<nn::Backbone> backbone_;
  nn::Linear head_;
  TrainLog train_log_;
  std::uint64_t train_seed_ = 0;
};

// Trains on gaze patches from the given split. Frames with invalid gaze are
// dropped first; the split must then be non-empty and cover >= 2 classes.
// Optionally starts from a weights file (e.g. an externally pretrained
// residual backbone).
PatchClassifier train_patch_classifier(
    const DatasetManifest& manifest, const std::string& split,
    const ClassifierSpec& spec, const TrainConfig& cfg,
    const std::filesystem::path& init_weights = {});

struct ClassifierEval {
  std::vector<int> confusion;  // C x C, row = true class, col = predicted
  double accuracy = 0.0;
  std::vector<double> precision;  // per class; -1 when undefined
  std::vector<double> recall;
  int total = 0;
  int num_classes = 0;

  int at(int true_c, int pred_c) const {
    return confusion[true_c * num_classes + pred_c];
  }
};

// Confusion accounting over (true, predicted) label pairs.
ClassifierEval evaluate_predictions(int num_classes,
                                    const std::vector<std::pair<int, int>>& tp);

// Classifies one gaze patch per valid-gaze frame of the split.
ClassifierEval evaluate_classifier(const PatchClassifier& model,
                                   const DatasetManifest& manifest,
                                   const std::string& split, int jobs = 1);

}  // namespace gazeattend

#endif  // GAZEATTEND_CLASSIFIER_HPP_
