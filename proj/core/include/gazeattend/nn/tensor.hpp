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
#ifndef GAZEATTEND_NN_TENSOR_HPP_
#define GAZEATTEND_NN_TENSOR_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace gazeattend::nn {

using MatrixRM =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatrixRM>;
using ConstMapRM = Eigen::Map<const MatrixRM>;

// Dense CHW float tensor. Channel-major, each channel a row-major plane.
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<float> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, 0.0f) {}

  std::size_t size() const { return v.size(); }
  int plane() const { return h * w; }

  float& at(int ci, int yi, int xi) {
    return v[(static_cast<std::size_t>(ci) * h + yi) * w + xi];
  }
  const float& at(int ci, int yi, int xi) const {
    return v[(static_cast<std::size_t>(ci) * h + yi) * w + xi];
  }

  // View as a (c x h*w) matrix; conv layers treat channels as rows.
  MapRM mat() { return MapRM(v.data(), c, plane()); }
  ConstMapRM mat() const { return ConstMapRM(v.data(), c, plane()); }
};

// Mean over the spatial extent of each channel.
Eigen::VectorXf spatial_mean(const Tensor& t);

// Zero-pads on the right/bottom so both sides are multiples of `multiple`.
// Returns the input unchanged when already aligned.
Tensor pad_to_multiple(const Tensor& t, int multiple);

Eigen::VectorXf softmax(const Eigen::VectorXf& logits);

}  // namespace gazeattend::nn

#endif  // GAZEATTEND_NN_TENSOR_HPP_
