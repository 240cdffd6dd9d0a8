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
#include "gazeattend/types.hpp"

#include <cmath>

namespace gazeattend {

bool is_normalized(const ProbVector& p, double tol) {
  double sum = 0.0;
  for (float x : p) {
    if (!(x >= 0.0f)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

int argmax(const ProbVector& p) {
  int best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace gazeattend
