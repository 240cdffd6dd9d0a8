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
#include "gazeattend/nn/tensor.hpp"

#include <cstring>

namespace gazeattend::nn {

Eigen::VectorXf spatial_mean(const Tensor& t) {
  return t.mat().rowwise().mean();
}

Tensor pad_to_multiple(const Tensor& t, int multiple) {
  auto round_up = [multiple](int n) {
    return ((n + multiple - 1) / multiple) * multiple;
  };
  int ph = round_up(t.h);
  int pw = round_up(t.w);
  if (ph == t.h && pw == t.w) return t;
  Tensor out(t.c, ph, pw);
  for (int c = 0; c < t.c; ++c) {
    for (int y = 0; y < t.h; ++y) {
      std::memcpy(&out.at(c, y, 0), &t.at(c, y, 0), sizeof(float) * t.w);
    }
  }
  return out;
}

Eigen::VectorXf softmax(const Eigen::VectorXf& logits) {
  Eigen::VectorXf z = logits.array() - logits.maxCoeff();
  Eigen::VectorXf e = z.array().exp();
  return e / e.sum();
}

}  // namespace gazeattend::nn
