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
#ifndef GAZEATTEND_DENSEINFER_HPP_
#define GAZEATTEND_DENSEINFER_HPP_

#include <filesystem>
#include <memory>

#include "gazeattend/classifier.hpp"
#include "gazeattend/gridmap.hpp"

namespace gazeattend {

// Classifies the clamped window at every grid cell independently; each cell
// runs the exact classify() code path. Cells may be evaluated in parallel.
// window/stride <= 0 fall back to the model spec (input_side / total_stride).
ClassProbMap sliding_window_inference(const PatchClassifier& model,
                                      const Image& frame, int window = 0,
                                      int stride = 0, int jobs = 1);

// Classifier backbone with the global average + linear head replaced by a
// 1x1 convolution carrying bit-copies of the head weights. Maps any frame
// with sides >= the backbone stride to a logits grid.
class DenseModel {
 public:
  DenseModel() = default;
  DenseModel(const DenseModel& o);
  DenseModel& operator=(const DenseModel& o);
  DenseModel(DenseModel&&) = default;
  DenseModel& operator=(DenseModel&&) = default;

  const ClassifierSpec& spec() const { return spec_; }
  const Preprocessing& preprocessing() const { return preproc_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const nn::Backbone& backbone() const { return *backbone_; }
  nn::Backbone& backbone() { return *backbone_; }
  const nn::Conv2d& head() const { return head_; }
  nn::Conv2d& head() { return head_; }

  nn::Tensor standardize(const Image& img) const;

  std::vector<nn::ParamRef> params();

  void save(const std::filesystem::path& dir) const;
  static DenseModel load(const std::filesystem::path& dir);

  friend DenseModel convert_to_fully_convolutional(const PatchClassifier&);

 private:
  ClassifierSpec spec_;
  Preprocessing preproc_;
  std::vector<std::string> class_names_;
  std::unique_ptr<nn::Backbone> backbone_;
  nn::Conv2d head_;  // 1x1, feature_dim -> num_classes
};

// Copies the backbone and rewires the linear head as a 1x1 convolution.
// Requires the GAP + linear structural contract; bit-exact and idempotent
// on the copied weights.
DenseModel convert_to_fully_convolutional(const PatchClassifier& model);

// Whole-frame single-pass inference: softmax over the logits grid. The grid
// follows the ceil law via right/bottom zero padding of the standardized
// input. Throws DataError when a frame side is below the backbone stride.
ClassProbMap dense_inference(const DenseModel& model, const Image& frame);

}  // namespace gazeattend

#endif  // GAZEATTEND_DENSEINFER_HPP_
