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
#ifndef GAZEATTEND_NN_BACKBONE_HPP_
#define GAZEATTEND_NN_BACKBONE_HPP_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "gazeattend/nn/layers.hpp"

namespace gazeattend::nn {

// Opaque per-forward state needed by the matching backward call.
struct ForwardTrace {
  virtual ~ForwardTrace() = default;
};

// Convolutional feature extractor contract: maps a CHW float image whose
// sides are multiples of total_stride() to a feature map of shape
// (feature_dim, h / stride, w / stride).
class Backbone {
 public:
  virtual ~Backbone() = default;

  virtual std::string id() const = 0;
  virtual int feature_dim() const = 0;
  virtual int total_stride() const = 0;

  // trace may be null for inference.
  virtual Tensor features(const Tensor& x,
                          std::unique_ptr<ForwardTrace>* trace) const = 0;
  // Accumulates parameter gradients for the forward recorded in `trace`.
  virtual void backward(ForwardTrace& trace, const Tensor& dfeat) = 0;

  virtual void init(Rng& rng) = 0;
  virtual void collect_params(std::vector<ParamRef>& out) = 0;

  virtual std::unique_ptr<Backbone> clone() const = 0;
};

// Five stride-2 3x3 convolutions, ReLU after each. Total stride 32,
// feature dim 128. Small enough to train from scratch on a desk-scale set.
class TinyBackbone : public Backbone {
 public:
  TinyBackbone();

  std::string id() const override { return "tiny"; }
  int feature_dim() const override;
  int total_stride() const override { return 32; }

  Tensor features(const Tensor& x,
                  std::unique_ptr<ForwardTrace>* trace) const override;
  void backward(ForwardTrace& trace, const Tensor& dfeat) override;

  void init(Rng& rng) override;
  void collect_params(std::vector<ParamRef>& out) override;
  std::unique_ptr<Backbone> clone() const override;

 private:
  std::array<Conv2d, 5> convs_;
};

// Residual feature extractor: 7x7 stem, max pool, then four stages of two
// basic blocks (64/128/256/512 channels). Total stride 32, feature dim 512.
// Normalization layers are expected to be folded into the convolution
// weights of any externally supplied checkpoint.
class ResidualBackbone : public Backbone {
 public:
  ResidualBackbone();

  std::string id() const override { return "resnet18"; }
  int feature_dim() const override { return 512; }
  int total_stride() const override { return 32; }

  Tensor features(const Tensor& x,
                  std::unique_ptr<ForwardTrace>* trace) const override;
  void backward(ForwardTrace& trace, const Tensor& dfeat) override;

  void init(Rng& rng) override;
  void collect_params(std::vector<ParamRef>& out) override;
  std::unique_ptr<Backbone> clone() const override;

 private:
  struct Block {
    Conv2d conv1, conv2;
    bool has_proj = false;
    Conv2d proj;
  };

  Conv2d stem_;
  MaxPool2d pool_;
  std::array<Block, 8> blocks_;
};

// Factory by spec id ("tiny" or "resnet18"); throws ConfigError otherwise.
std::unique_ptr<Backbone> make_backbone(const std::string& id);

}  // namespace gazeattend::nn

#endif  // GAZEATTEND_NN_BACKBONE_HPP_
