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
// Microbenchmarks for the inference-critical paths. The sliding/dense pair
// on a shared frame is the headline comparison; the rest isolates the layers
// that dominate those numbers.
#include <benchmark/benchmark.h>

#include <vector>

#include "gazeattend/classifier.hpp"
#include "gazeattend/denseinfer.hpp"
#include "gazeattend/distill.hpp"
#include "gazeattend/image.hpp"
#include "gazeattend/nn/layers.hpp"
#include "gazeattend/nn/tensor.hpp"
#include "gazeattend/rng.hpp"

namespace gazeattend {
namespace {

Image RandomFrame(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  Image img;
  img.width = width;
  img.height = height;
  img.rgb.resize(static_cast<std::size_t>(width) * height * 3);
  for (auto& b : img.rgb) {
    b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  }
  return img;
}

// Shared randomly initialized classifier: benchmarks measure throughput, so
// trained weights would change nothing but the setup cost.
const PatchClassifier& Model() {
  static const PatchClassifier model = [] {
    ClassifierSpec spec;
    spec.backbone_id = "tiny";
    spec.num_classes = 6;
    spec.input_side = 96;
    PatchClassifier m(spec, {"a", "b", "c", "d", "e", "other"});
    Rng rng(1);
    m.backbone().init(rng);
    m.head().init(rng);
    return m;
  }();
  return model;
}

const DenseModel& Dense() {
  static const DenseModel dense = convert_to_fully_convolutional(Model());
  return dense;
}

void BM_ConvForward3x3(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  nn::Conv2d conv(3, 16, 3, 2, 1);
  Rng rng(2);
  conv.init_he(rng);
  nn::Tensor x(3, side, side);
  for (auto& v : x.v) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.forward(x, nullptr));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConvForward3x3)->Arg(96)->Arg(300);

void BM_PatchClassify(benchmark::State& state) {
  Image patch = RandomFrame(96, 96, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Model().classify(patch));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PatchClassify);

void BM_SlidingInference(benchmark::State& state) {
  Image frame = RandomFrame(640, 384, 4);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sliding_window_inference(Model(), frame, 0, 0, jobs));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SlidingInference)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DenseInference(benchmark::State& state) {
  Image frame = RandomFrame(640, 384, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dense_inference(Dense(), frame));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DenseInference)->Unit(benchmark::kMillisecond);

void BM_KlDivergence(benchmark::State& state) {
  Rng rng(5);
  const int n = 16;
  std::vector<float> p(n), q(n);
  float sp = 0.0f, sq = 0.0f;
  for (int i = 0; i < n; ++i) {
    p[i] = static_cast<float>(rng.uniform_real(0.01, 1.0));
    q[i] = static_cast<float>(rng.uniform_real(0.01, 1.0));
    sp += p[i];
    sq += q[i];
  }
  for (int i = 0; i < n; ++i) {
    p[i] /= sp;
    q[i] /= sq;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kl_divergence(p, q));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KlDivergence);

}  // namespace
}  // namespace gazeattend

BENCHMARK_MAIN();
