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
#include "gazeattend/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "gazeattend/errors.hpp"
#include "gazeattend/image.hpp"
#include "gazeattend/parallel.hpp"
#include "gazeattend/rng.hpp"

namespace gazeattend {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (learning_rate <= 0) throw ConfigError("learning_rate must be > 0");
  if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0, 1)");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
  if (holdout_fraction < 0 || holdout_fraction > 0.5) {
    throw ConfigError("holdout_fraction must be in [0, 0.5]");
  }
}

PatchClassifier::PatchClassifier(const ClassifierSpec& spec,
                                 std::vector<std::string> class_names)
    : spec_(spec), class_names_(std::move(class_names)) {
  if (spec.num_classes != static_cast<int>(class_names_.size())) {
    throw ConfigError("num_classes does not match the class name list");
  }
  if (spec.input_side < 1) throw ConfigError("input_side must be >= 1");
  backbone_ = nn::make_backbone(spec.backbone_id);
  if (backbone_->total_stride() != spec.total_stride) {
    throw ConfigError("backbone \"" + spec.backbone_id + "\" has stride " +
                      std::to_string(backbone_->total_stride()) +
                      ", spec asks for " + std::to_string(spec.total_stride));
  }
  head_ = nn::Linear(backbone_->feature_dim(), spec.num_classes);
}

PatchClassifier::PatchClassifier(const PatchClassifier& o)
    : spec_(o.spec_),
      preproc_(o.preproc_),
      class_names_(o.class_names_),
      backbone_(o.backbone_ ? o.backbone_->clone() : nullptr),
      head_(o.head_),
      train_log_(o.train_log_),
      train_seed_(o.train_seed_) {}

PatchClassifier& PatchClassifier::operator=(const PatchClassifier& o) {
  if (this != &o) {
    spec_ = o.spec_;
    preproc_ = o.preproc_;
    class_names_ = o.class_names_;
    backbone_ = o.backbone_ ? o.backbone_->clone() : nullptr;
    head_ = o.head_;
    train_log_ = o.train_log_;
    train_seed_ = o.train_seed_;
  }
  return *this;
}

nn::Tensor standardize_image(const Image& img, const Preprocessing& pre,
                             int stride_multiple) {
  nn::Tensor t(3, img.height, img.width);
  const float inv255 = 1.0f / 255.0f;
  for (int c = 0; c < 3; ++c) {
    const float mean = pre.mean[c];
    const float inv_std = 1.0f / pre.stdev[c];
    float* plane = &t.at(c, 0, 0);
    const std::uint8_t* src = img.rgb.data() + c;
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = (src[i * 3] * inv255 - mean) * inv_std;
    }
  }
  // Zero in standardized space, so padded cells look like the channel mean.
  return nn::pad_to_multiple(t, stride_multiple);
}

nn::Tensor PatchClassifier::standardize(const Image& img) const {
  return standardize_image(img, preproc_, spec_.total_stride);
}

ProbVector PatchClassifier::classify(const Image& patch) const {
  if (patch.rgb.empty()) throw DataError("empty patch");
  nn::Tensor x = standardize(patch);
  nn::Tensor feat = backbone_->features(x, nullptr);
  Eigen::VectorXf logits = head_.forward(nn::spatial_mean(feat));
  Eigen::VectorXf p = nn::softmax(logits);
  return ProbVector(p.data(), p.data() + p.size());
}

std::vector<nn::ParamRef> PatchClassifier::params() {
  std::vector<nn::ParamRef> out;
  backbone_->collect_params(out);
  head_.collect_params("head", out);
  return out;
}

void PatchClassifier::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["kind"] = "patch_classifier";
  j["backbone"] = spec_.backbone_id;
  j["num_classes"] = spec_.num_classes;
  j["input_side"] = spec_.input_side;
  j["total_stride"] = spec_.total_stride;
  j["class_names"] = class_names_;
  j["preprocessing"]["mean"] = preproc_.mean;
  j["preprocessing"]["stdev"] = preproc_.stdev;
  j["train"]["seed"] = train_seed_;
  j["train"]["first_epoch_loss"] = train_log_.first_epoch_loss;
  j["train"]["best_holdout_loss"] = train_log_.best_holdout_loss;
  j["train"]["best_epoch"] = train_log_.best_epoch;
  j["train"]["epochs_run"] = train_log_.epochs_run;
  j["train"]["final_train_accuracy"] = train_log_.final_train_accuracy;

  std::ofstream out(dir / "model.json");
  if (!out) throw DataError("cannot write " + (dir / "model.json").string());
  out << j.dump(2) << "\n";

  auto params = const_cast<PatchClassifier*>(this)->params();
  nn::save_weights(params, dir / "weights.bin");
}

PatchClassifier PatchClassifier::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw DataError("cannot read " + (dir / "model.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model.json: " + std::string(e.what()));
  }
  if (j.value("kind", "") != "patch_classifier") {
    throw DataError(dir.string() + " does not hold a patch classifier");
  }
  ClassifierSpec spec;
  spec.backbone_id = j.at("backbone").get<std::string>();
  spec.num_classes = j.at("num_classes").get<int>();
  spec.input_side = j.at("input_side").get<int>();
  spec.total_stride = j.at("total_stride").get<int>();
  PatchClassifier model(spec, j.at("class_names").get<std::vector<std::string>>());
  Preprocessing pre;
  for (int c = 0; c < 3; ++c) {
    pre.mean[c] = j.at("preprocessing").at("mean").at(c).get<float>();
    pre.stdev[c] = j.at("preprocessing").at("stdev").at(c).get<float>();
  }
  model.set_preprocessing(pre);
  if (j.contains("train")) {
    const auto& t = j["train"];
    model.set_train_seed(t.value("seed", std::uint64_t{0}));
    TrainLog log;
    log.first_epoch_loss = t.value("first_epoch_loss", 0.0);
    log.best_holdout_loss = t.value("best_holdout_loss", 0.0);
    log.best_epoch = t.value("best_epoch", 0);
    log.epochs_run = t.value("epochs_run", 0);
    log.final_train_accuracy = t.value("final_train_accuracy", 0.0);
    model.set_train_log(log);
  }
  auto params = model.params();
  nn::load_weights(params, dir / "weights.bin");
  return model;
}

namespace {

Image flip_horizontal(const Image& img) {
  Image out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t* src = img.px(img.width - 1 - x, y);
      std::uint8_t* dst = out.px(x, y);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }
  return out;
}

struct Sample {
  Image patch;
  int label = 0;
};

// Forward + backward for one sample; returns (loss, correct).
std::pair<double, bool> train_step(PatchClassifier& model, const Image& patch,
                                   int label, float weight, float inv_batch) {
  nn::Tensor x = model.standardize(patch);
  std::unique_ptr<nn::ForwardTrace> trace;
  nn::Tensor feat = model.backbone().features(x, &trace);
  Eigen::VectorXf mean = nn::spatial_mean(feat);
  Eigen::VectorXf logits = model.head().forward(mean);
  Eigen::VectorXf p = nn::softmax(logits);

  const double loss = -weight * std::log(std::max(p[label], 1e-12f));
  const bool correct = argmax(ProbVector(p.data(), p.data() + p.size())) == label;

  Eigen::VectorXf dlogits = p * (weight * inv_batch);
  dlogits[label] -= weight * inv_batch;
  Eigen::VectorXf dmean = model.head().backward(mean, dlogits);

  nn::Tensor dfeat(feat.c, feat.h, feat.w);
  const float inv_plane = 1.0f / static_cast<float>(feat.plane());
  for (int c = 0; c < feat.c; ++c) {
    const float g = dmean[c] * inv_plane;
    float* row = &dfeat.at(c, 0, 0);
    std::fill(row, row + feat.plane(), g);
  }
  model.backbone().backward(*trace, dfeat);
  return {loss, correct};
}

double holdout_loss(const PatchClassifier& model,
                    const std::vector<Sample>& samples,
                    const std::vector<std::size_t>& idx) {
  double total = 0.0;
  for (std::size_t i : idx) {
    ProbVector p = model.classify(samples[i].patch);
    total += -std::log(std::max(p[samples[i].label], 1e-12f));
  }
  return total / static_cast<double>(idx.size());
}

}  // namespace

PatchClassifier train_patch_classifier(const DatasetManifest& manifest,
                                       const std::string& split,
                                       const ClassifierSpec& spec,
                                       const TrainConfig& cfg,
                                       const std::filesystem::path& init_weights) {
  cfg.validate();
  if (spec.num_classes != manifest.num_classes()) {
    throw ConfigError("spec.num_classes (" + std::to_string(spec.num_classes) +
                      ") does not match the manifest (" +
                      std::to_string(manifest.num_classes()) + ")");
  }

  GazeFilterResult filtered = filter_valid_gaze(manifest);
  auto frames = filtered.manifest.split_frames(split);
  if (frames.empty()) {
    throw DataError("split \"" + split + "\" has no frames with valid gaze");
  }
  std::set<int> labels_seen;
  for (const auto* f : frames) labels_seen.insert(f->attended_class);
  if (labels_seen.size() < 2) {
    throw DataError("split \"" + split + "\" covers fewer than two classes");
  }

  PatchClassifier model(spec, filtered.manifest.class_names);
  Rng rng(cfg.seed);
  model.backbone().init(rng);
  model.head().init(rng);
  model.set_train_seed(cfg.seed);
  if (!init_weights.empty()) {
    auto params = model.params();
    nn::load_weights(params, init_weights, /*allow_missing=*/true);
  }

  // All training patches are cropped once and kept in memory; at 300x300
  // RGB that is ~0.26 MB per frame.
  std::vector<Sample> samples;
  samples.reserve(frames.size());
  for (const auto* f : frames) {
    Patch p = sample_gaze_patch(filtered.manifest, *f, spec.input_side);
    samples.push_back({std::move(p.pixels), p.label});
  }

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t n_hold = static_cast<std::size_t>(
      std::floor(cfg.holdout_fraction * static_cast<double>(order.size())));
  std::vector<std::size_t> hold(order.begin(), order.begin() + n_hold);
  std::vector<std::size_t> train(order.begin() + n_hold, order.end());
  if (train.empty()) throw DataError("holdout leaves no training patches");

  std::vector<float> class_weight(spec.num_classes, 1.0f);
  if (cfg.class_weighting) {
    std::vector<int> counts(spec.num_classes, 0);
    for (std::size_t i : train) ++counts[samples[i].label];
    for (int c = 0; c < spec.num_classes; ++c) {
      if (counts[c] > 0) {
        class_weight[c] = static_cast<float>(train.size()) /
                          (static_cast<float>(spec.num_classes) * counts[c]);
      }
    }
  }

  auto params = model.params();
  nn::SgdOptimizer opt(cfg.learning_rate, cfg.momentum);

  TrainLog log;
  PatchClassifier best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(train);
    double epoch_loss = 0.0;
    int correct = 0;
    for (std::size_t start = 0; start < train.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(train.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const float inv_batch = 1.0f / static_cast<float>(end - start);
      nn::SgdOptimizer::zero_grad(params);
      for (std::size_t i = start; i < end; ++i) {
        const Sample& s = samples[train[i]];
        bool flip = cfg.horizontal_flip && rng.bernoulli(0.5);
        auto [loss, ok] = train_step(model, flip ? flip_horizontal(s.patch) : s.patch,
                                     s.label, class_weight[s.label], inv_batch);
        epoch_loss += loss;
        correct += ok ? 1 : 0;
      }
      opt.step(params);
    }
    epoch_loss /= static_cast<double>(train.size());
    const double accuracy = static_cast<double>(correct) / train.size();
    if (epoch == 0) log.first_epoch_loss = epoch_loss;
    log.epochs_run = epoch + 1;

    const double score = hold.empty() ? epoch_loss : holdout_loss(model, samples, hold);
    if (score < best_loss) {
      best_loss = score;
      best = model;
      since_best = 0;
      log.best_epoch = epoch;
      log.best_holdout_loss = score;
      log.final_train_accuracy = accuracy;
    } else if (++since_best > cfg.patience) {
      break;
    }
  }

  best.set_train_log(log);
  best.set_train_seed(cfg.seed);
  return best;
}

ClassifierEval evaluate_predictions(int num_classes,
                                    const std::vector<std::pair<int, int>>& tp) {
  ClassifierEval e;
  e.num_classes = num_classes;
  e.confusion.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
  for (const auto& [truth, pred] : tp) {
    if (truth < 0 || truth >= num_classes || pred < 0 || pred >= num_classes) {
      throw DataError("label outside [0, num_classes)");
    }
    ++e.confusion[static_cast<std::size_t>(truth) * num_classes + pred];
    ++e.total;
  }
  int diag = 0;
  e.precision.assign(num_classes, -1.0);
  e.recall.assign(num_classes, -1.0);
  for (int c = 0; c < num_classes; ++c) {
    diag += e.at(c, c);
    int row = 0, col = 0;
    for (int k = 0; k < num_classes; ++k) {
      row += e.at(c, k);
      col += e.at(k, c);
    }
    if (col > 0) e.precision[c] = static_cast<double>(e.at(c, c)) / col;
    if (row > 0) e.recall[c] = static_cast<double>(e.at(c, c)) / row;
  }
  e.accuracy = e.total > 0 ? static_cast<double>(diag) / e.total : 0.0;
  return e;
}

ClassifierEval evaluate_classifier(const PatchClassifier& model,
                                   const DatasetManifest& manifest,
                                   const std::string& split, int jobs) {
  GazeFilterResult filtered = filter_valid_gaze(manifest);
  auto frames = filtered.manifest.split_frames(split);
  if (frames.empty()) {
    throw DataError("split \"" + split + "\" has no frames with valid gaze");
  }
  std::vector<std::pair<int, int>> pairs(frames.size());
  parallel_for(frames.size(), jobs, [&](std::size_t i) {
    Patch p = sample_gaze_patch(filtered.manifest, *frames[i],
                                model.spec().input_side);
    pairs[i] = {p.label, argmax(model.classify(p))};
  });
  return evaluate_predictions(manifest.num_classes(), pairs);
}

}  // namespace gazeattend
