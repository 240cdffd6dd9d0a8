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
#include "gazeattend/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gazeattend/errors.hpp"
#include "gazeattend/image.hpp"
#include "gazeattend/parallel.hpp"
#include "gazeattend/rng.hpp"

namespace gazeattend {

double kl_divergence(std::span<const float> p, std::span<const float> q) {
  if (p.size() != q.size() || p.empty()) {
    throw NumericalError("KL arguments must have equal, non-zero length");
  }
  if (!is_normalized(ProbVector(p.begin(), p.end())) ||
      !is_normalized(ProbVector(q.begin(), q.end()))) {
    throw NumericalError("KL arguments must be normalized distributions");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0f) continue;  // 0 * ln(0 / q) == 0
    const double qi = std::max(static_cast<double>(q[i]), kKlEpsilon);
    kl += p[i] * std::log(p[i] / qi);
  }
  return kl;
}

void DistillConfig::validate() const {
  if (num_frames < 1) throw ConfigError("num_frames must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (learning_rate <= 0) throw ConfigError("learning_rate must be > 0");
  if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0, 1)");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
}

DistillSelection select_distill_frames(const DatasetManifest& manifest, int n,
                                       std::uint64_t seed) {
  if (n < 1) throw ConfigError("frame count must be >= 1");
  const int other = manifest.other_index();
  std::vector<std::string> eligible;
  for (const auto* f : manifest.split_frames("train")) {
    if (f->attended_class != other) eligible.push_back(f->id);
  }
  if (eligible.empty()) {
    throw DataError("no train frames with an attended object");
  }
  DistillSelection sel;
  if (static_cast<int>(eligible.size()) <= n) {
    sel.frame_ids = std::move(eligible);
    sel.saturated = static_cast<int>(sel.frame_ids.size()) < n;
  } else {
    Rng rng(seed);
    rng.shuffle(eligible);
    sel.frame_ids.assign(eligible.begin(), eligible.begin() + n);
  }
  std::sort(sel.frame_ids.begin(), sel.frame_ids.end());
  return sel;
}

TeacherSet load_teacher_set(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw DataError("teacher directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".cpm") {
      files.push_back(e.path());
    }
  }
  if (files.empty()) {
    throw DataError("no .cpm teacher maps in " + dir.string());
  }
  std::sort(files.begin(), files.end());
  TeacherSet set;
  for (const auto& f : files) {
    set.maps.emplace_back(f.stem().string(), load_prob_map(f));
  }
  return set;
}

namespace {

struct DistillFrame {
  const ClassProbMap* teacher = nullptr;
  Image image;
};

// Resolves teacher maps against the manifest and loads the frame images.
std::vector<DistillFrame> gather_frames(const TeacherSet& teachers,
                                        const DatasetManifest& manifest,
                                        const DenseModel& model) {
  std::vector<DistillFrame> frames;
  frames.reserve(teachers.maps.size());
  for (const auto& [id, teacher] : teachers.maps) {
    const FrameRecord* rec = manifest.find_frame(id);
    if (rec == nullptr) {
      throw DataError("teacher map frame \"" + id + "\" is not in the manifest");
    }
    DistillFrame df;
    df.teacher = &teacher;
    df.image = load_image(manifest.resolve_image(*rec));
    if (df.image.width != manifest.frame_width ||
        df.image.height != manifest.frame_height) {
      throw DataError("frame " + id + " image size differs from the manifest");
    }
    GridGeometry expect =
        GridGeometry::make(df.image.width, df.image.height,
                           model.spec().total_stride, teacher.geom.window);
    if (!(teacher.geom == expect) ||
        teacher.num_classes != model.spec().num_classes) {
      throw DataError("teacher map for frame " + id +
                      " does not match the model output grid");
    }
    frames.push_back(std::move(df));
  }
  return frames;
}

double frame_kl(const DenseModel& model, const DistillFrame& f,
                bool teacher_first) {
  ClassProbMap student = dense_inference(model, f.image);
  const GridGeometry& g = student.geom;
  const int C = student.num_classes;
  double total = 0.0;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      std::span<const float> s(student.cell(r, c), C);
      std::span<const float> t(f.teacher->cell(r, c), C);
      total += teacher_first ? kl_divergence(t, s) : kl_divergence(s, t);
    }
  }
  return total / (static_cast<double>(g.rows) * g.cols);
}

double mean_kl(const DenseModel& model, const std::vector<DistillFrame>& frames,
               bool teacher_first, int jobs) {
  std::vector<double> per_frame(frames.size(), 0.0);
  parallel_for(frames.size(), jobs, [&](std::size_t i) {
    per_frame[i] = frame_kl(model, frames[i], teacher_first);
  });
  double total = 0.0;
  for (double v : per_frame) total += v;
  return total / static_cast<double>(frames.size());
}

// One frame's forward/backward; returns the frame's mean cell KL.
double distill_step(DenseModel& model, const DistillFrame& f,
                    bool teacher_first, float inv_batch) {
  nn::Tensor x = model.standardize(f.image);
  std::unique_ptr<nn::ForwardTrace> trace;
  nn::Tensor feat = model.backbone().features(x, &trace);
  nn::ConvCache head_cache;
  nn::Tensor logits = model.head().forward(feat, &head_cache);

  const int C = logits.c;
  const int rows = logits.h;
  const int cols = logits.w;
  const float inv_cells = 1.0f / static_cast<float>(rows * cols);

  nn::Tensor dlogits(C, rows, cols);
  double loss = 0.0;
  Eigen::VectorXf z(C), s(C);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int k = 0; k < C; ++k) z[k] = logits.at(k, r, c);
      s = nn::softmax(z);
      const float* t = f.teacher->cell(r, c);
      if (teacher_first) {
        // d/dz_k sum_j t_j ln(t_j / s_j) = s_k - t_k
        double cell = 0.0;
        for (int k = 0; k < C; ++k) {
          if (t[k] > 0.0f) {
            cell += t[k] * std::log(t[k] / std::max(static_cast<double>(s[k]),
                                                    kKlEpsilon));
          }
          dlogits.at(k, r, c) = (s[k] - t[k]) * inv_cells * inv_batch;
        }
        loss += cell;
      } else {
        // d/dz_k sum_j s_j ln(s_j / t_j) = s_k (ln(s_k / t_k) - L)
        double cell = 0.0;
        Eigen::VectorXf ratio(C);
        for (int k = 0; k < C; ++k) {
          const double tk = std::max(static_cast<double>(t[k]), kKlEpsilon);
          ratio[k] = static_cast<float>(
              std::log(std::max(static_cast<double>(s[k]), kKlEpsilon) / tk));
          cell += s[k] * ratio[k];
        }
        for (int k = 0; k < C; ++k) {
          dlogits.at(k, r, c) =
              s[k] * (ratio[k] - static_cast<float>(cell)) * inv_cells * inv_batch;
        }
        loss += cell;
      }
    }
  }

  nn::Tensor dfeat = model.head().backward(head_cache, dlogits);
  model.backbone().backward(*trace, dfeat);
  return loss * inv_cells;
}

}  // namespace

double mean_teacher_kl(const DenseModel& model, const TeacherSet& teachers,
                       const DatasetManifest& manifest, bool teacher_first,
                       int jobs) {
  if (teachers.maps.empty()) throw DataError("teacher set is empty");
  auto frames = gather_frames(teachers, manifest, model);
  return mean_kl(model, frames, teacher_first, jobs);
}

DistillResult finetune_kl(const DenseModel& model, const TeacherSet& teachers,
                          const DatasetManifest& manifest,
                          const DistillConfig& cfg, int jobs) {
  cfg.validate();
  if (teachers.maps.empty()) throw DataError("teacher set is empty");

  DistillResult result;
  result.model = model;
  auto frames = gather_frames(teachers, manifest, result.model);

  result.initial_kl = mean_kl(result.model, frames, cfg.teacher_first, jobs);
  result.best_kl = result.initial_kl;
  result.best_epoch = 0;
  DenseModel best = result.model;

  auto params = result.model.params();
  nn::SgdOptimizer opt(cfg.learning_rate, cfg.momentum);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(frames.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const float inv_batch = 1.0f / static_cast<float>(end - start);
      nn::SgdOptimizer::zero_grad(params);
      for (std::size_t i = start; i < end; ++i) {
        distill_step(result.model, frames[order[i]], cfg.teacher_first, inv_batch);
      }
      opt.step(params);
    }
    const double kl = mean_kl(result.model, frames, cfg.teacher_first, jobs);
    result.epoch_kl.push_back(kl);
    if (kl < result.best_kl) {
      result.best_kl = kl;
      result.best_epoch = epoch;
      best = result.model;
      since_best = 0;
    } else if (++since_best > cfg.patience) {
      break;
    }
  }

  result.model = std::move(best);
  return result;
}

}  // namespace gazeattend
