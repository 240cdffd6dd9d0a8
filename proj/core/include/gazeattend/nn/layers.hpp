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
#ifndef GAZEATTEND_NN_LAYERS_HPP_
#define GAZEATTEND_NN_LAYERS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gazeattend/nn/tensor.hpp"
#include "gazeattend/rng.hpp"

namespace gazeattend::nn {

// Named view of one learnable parameter buffer and its gradient.
struct ParamRef {
  std::string name;
  float* data = nullptr;
  float* grad = nullptr;
  std::size_t size = 0;
  std::vector<int> shape;
};

struct ConvCache {
  MatrixRM cols;  // (in_ch*k*k) x (oh*ow)
  int in_h = 0, in_w = 0, out_h = 0, out_w = 0;
};

// 2D convolution with bias, computed as im2col followed by one GEMM.
// Output spatial size is floor((n + 2*pad - k) / stride) + 1 per axis.
struct Conv2d {
  int in_ch = 0, out_ch = 0, k = 1, stride = 1, pad = 0;
  MatrixRM weight;       // out_ch x (in_ch*k*k)
  Eigen::VectorXf bias;  // out_ch
  MatrixRM grad_weight;
  Eigen::VectorXf grad_bias;

  Conv2d() = default;
  Conv2d(int in, int out, int kernel, int stride_, int pad_);

  void init_he(Rng& rng);
  int out_dim(int n) const { return (n + 2 * pad - k) / stride + 1; }

  // cache may be null for inference-only calls.
  Tensor forward(const Tensor& x, ConvCache* cache) const;
  // Accumulates grad_weight/grad_bias and returns dL/dx.
  Tensor backward(const ConvCache& cache, const Tensor& dy);

  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

struct ReluCache {
  std::vector<std::uint8_t> mask;  // 1 where the input was positive
};

Tensor relu(const Tensor& x, ReluCache* cache);
Tensor relu_backward(const ReluCache& cache, const Tensor& dy);

struct MaxPoolCache {
  std::vector<std::int32_t> argmax;  // flat input index per output element
  int in_h = 0, in_w = 0;
};

// Max pooling, k x k window. Padded cells are treated as -inf.
struct MaxPool2d {
  int k = 3, stride = 2, pad = 1;
  Tensor forward(const Tensor& x, MaxPoolCache* cache) const;
  Tensor backward(const MaxPoolCache& cache, int channels, const Tensor& dy) const;
};

// Fully connected head on a feature vector.
struct Linear {
  int in_dim = 0, out_dim = 0;
  MatrixRM weight;  // out x in
  Eigen::VectorXf bias;
  MatrixRM grad_weight;
  Eigen::VectorXf grad_bias;

  Linear() = default;
  Linear(int in, int out);
  void init(Rng& rng, float stdev = 0.01f);

  Eigen::VectorXf forward(const Eigen::VectorXf& x) const;
  // Accumulates grads; returns dL/dx.
  Eigen::VectorXf backward(const Eigen::VectorXf& x, const Eigen::VectorXf& dy);

  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Plain SGD with momentum. Velocity buffers are keyed by parameter order,
// which is stable for a fixed architecture.
class SgdOptimizer {
 public:
  SgdOptimizer(double lr, double momentum) : lr_(lr), momentum_(momentum) {}

  void step(std::vector<ParamRef>& params);
  static void zero_grad(std::vector<ParamRef>& params);

 private:
  double lr_, momentum_;
  std::vector<std::vector<float>> velocity_;
};

// weights.bin container: named float tensors, little-endian.
void save_weights(const std::vector<ParamRef>& params,
                  const std::filesystem::path& path);
// Fills existing buffers by name; throws DataError on shape mismatch or,
// unless allow_missing is set, on absent tensors. Returns the number of
// parameters that were filled.
std::size_t load_weights(std::vector<ParamRef>& params,
                         const std::filesystem::path& path,
                         bool allow_missing = false);

}  // namespace gazeattend::nn

#endif  // GAZEATTEND_NN_LAYERS_HPP_
