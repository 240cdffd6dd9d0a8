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
#include "gazeattend/nn/backbone.hpp"

#include "gazeattend/errors.hpp"

namespace gazeattend::nn {

namespace {

void add_inplace(Tensor& a, const Tensor& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
}

constexpr int kTinyChannels[6] = {3, 16, 32, 64, 64, 128};

struct TinyTrace : ForwardTrace {
  std::array<ConvCache, 5> conv;
  std::array<ReluCache, 5> act;
};

}  // namespace

TinyBackbone::TinyBackbone() {
  for (int i = 0; i < 5; ++i) {
    convs_[i] = Conv2d(kTinyChannels[i], kTinyChannels[i + 1], 3, 2, 1);
  }
}

int TinyBackbone::feature_dim() const { return convs_.back().out_ch; }

Tensor TinyBackbone::features(const Tensor& x,
                              std::unique_ptr<ForwardTrace>* trace) const {
  TinyTrace* t = nullptr;
  if (trace != nullptr) {
    auto owned = std::make_unique<TinyTrace>();
    t = owned.get();
    *trace = std::move(owned);
  }
  Tensor h = x;
  for (int i = 0; i < 5; ++i) {
    h = convs_[i].forward(h, t != nullptr ? &t->conv[i] : nullptr);
    h = relu(h, t != nullptr ? &t->act[i] : nullptr);
  }
  return h;
}

void TinyBackbone::backward(ForwardTrace& trace, const Tensor& dfeat) {
  auto& t = dynamic_cast<TinyTrace&>(trace);
  Tensor d = dfeat;
  for (int i = 4; i >= 0; --i) {
    d = relu_backward(t.act[i], d);
    d = convs_[i].backward(t.conv[i], d);
  }
}

void TinyBackbone::init(Rng& rng) {
  for (auto& c : convs_) c.init_he(rng);
}

void TinyBackbone::collect_params(std::vector<ParamRef>& out) {
  for (int i = 0; i < 5; ++i) {
    convs_[i].collect_params("conv" + std::to_string(i), out);
  }
}

std::unique_ptr<Backbone> TinyBackbone::clone() const {
  return std::make_unique<TinyBackbone>(*this);
}

namespace {

struct BlockTrace {
  ConvCache c1, c2, cproj;
  ReluCache r1, r2;  // r2 is the activation after the skip addition
};

struct ResidualTrace : ForwardTrace {
  ConvCache stem;
  ReluCache stem_act;
  MaxPoolCache pool;
  std::array<BlockTrace, 8> blocks;
};

}  // namespace

ResidualBackbone::ResidualBackbone() : stem_(3, 64, 7, 2, 3) {
  for (int stage = 0; stage < 4; ++stage) {
    const int out_ch = 64 << stage;
    const int prev_ch = stage == 0 ? 64 : out_ch / 2;
    for (int b = 0; b < 2; ++b) {
      Block& blk = blocks_[stage * 2 + b];
      const int in_ch = b == 0 ? prev_ch : out_ch;
      const int stride = (b == 0 && stage > 0) ? 2 : 1;
      blk.conv1 = Conv2d(in_ch, out_ch, 3, stride, 1);
      blk.conv2 = Conv2d(out_ch, out_ch, 3, 1, 1);
      blk.has_proj = in_ch != out_ch || stride != 1;
      if (blk.has_proj) blk.proj = Conv2d(in_ch, out_ch, 1, stride, 0);
    }
  }
}

Tensor ResidualBackbone::features(const Tensor& x,
                                  std::unique_ptr<ForwardTrace>* trace) const {
  ResidualTrace* t = nullptr;
  if (trace != nullptr) {
    auto owned = std::make_unique<ResidualTrace>();
    t = owned.get();
    *trace = std::move(owned);
  }
  auto cache = [&](ConvCache& c) { return t != nullptr ? &c : nullptr; };

  Tensor h = stem_.forward(x, t != nullptr ? &t->stem : nullptr);
  h = relu(h, t != nullptr ? &t->stem_act : nullptr);
  h = pool_.forward(h, t != nullptr ? &t->pool : nullptr);

  for (int i = 0; i < 8; ++i) {
    const Block& blk = blocks_[i];
    BlockTrace* bt = t != nullptr ? &t->blocks[i] : nullptr;
    Tensor shortcut = blk.has_proj
                          ? blk.proj.forward(h, bt != nullptr ? &bt->cproj : nullptr)
                          : h;
    Tensor y = blk.conv1.forward(h, bt != nullptr ? &bt->c1 : nullptr);
    y = relu(y, bt != nullptr ? &bt->r1 : nullptr);
    y = blk.conv2.forward(y, bt != nullptr ? &bt->c2 : nullptr);
    add_inplace(y, shortcut);
    h = relu(y, bt != nullptr ? &bt->r2 : nullptr);
  }
  (void)cache;
  return h;
}

void ResidualBackbone::backward(ForwardTrace& trace, const Tensor& dfeat) {
  auto& t = dynamic_cast<ResidualTrace&>(trace);
  Tensor d = dfeat;
  for (int i = 7; i >= 0; --i) {
    Block& blk = blocks_[i];
    BlockTrace& bt = t.blocks[i];
    Tensor d_sum = relu_backward(bt.r2, d);
    Tensor d_main = blk.conv2.backward(bt.c2, d_sum);
    d_main = relu_backward(bt.r1, d_main);
    Tensor dx = blk.conv1.backward(bt.c1, d_main);
    if (blk.has_proj) {
      add_inplace(dx, blk.proj.backward(bt.cproj, d_sum));
    } else {
      add_inplace(dx, d_sum);
    }
    d = std::move(dx);
  }
  d = pool_.backward(t.pool, stem_.out_ch, d);
  d = relu_backward(t.stem_act, d);
  stem_.backward(t.stem, d);
}

void ResidualBackbone::init(Rng& rng) {
  stem_.init_he(rng);
  for (auto& blk : blocks_) {
    blk.conv1.init_he(rng);
    blk.conv2.init_he(rng);
    if (blk.has_proj) blk.proj.init_he(rng);
  }
}

void ResidualBackbone::collect_params(std::vector<ParamRef>& out) {
  stem_.collect_params("stem", out);
  for (int i = 0; i < 8; ++i) {
    const std::string prefix =
        "layer" + std::to_string(i / 2 + 1) + "." + std::to_string(i % 2);
    blocks_[i].conv1.collect_params(prefix + ".conv1", out);
    blocks_[i].conv2.collect_params(prefix + ".conv2", out);
    if (blocks_[i].has_proj) {
      blocks_[i].proj.collect_params(prefix + ".downsample", out);
    }
  }
}

std::unique_ptr<Backbone> ResidualBackbone::clone() const {
  return std::make_unique<ResidualBackbone>(*this);
}

std::unique_ptr<Backbone> make_backbone(const std::string& id) {
  if (id == "tiny") return std::make_unique<TinyBackbone>();
  if (id == "resnet18") return std::make_unique<ResidualBackbone>();
  throw ConfigError("unknown backbone id: \"" + id +
                    "\" (expected \"tiny\" or \"resnet18\")");
}

}  // namespace gazeattend::nn
