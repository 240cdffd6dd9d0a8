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
#include "gazeattend/denseinfer.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "gazeattend/errors.hpp"
#include "gazeattend/image.hpp"
#include "gazeattend/parallel.hpp"

namespace gazeattend {

namespace {

Image crop(const Image& img, int x0, int y0, int side) {
  Image out;
  out.width = side;
  out.height = side;
  out.rgb.resize(static_cast<std::size_t>(side) * side * 3);
  for (int y = 0; y < side; ++y) {
    std::memcpy(out.px(0, y), img.px(x0, y0 + y),
                static_cast<std::size_t>(side) * 3);
  }
  return out;
}

}  // namespace

ClassProbMap sliding_window_inference(const PatchClassifier& model,
                                      const Image& frame, int window,
                                      int stride, int jobs) {
  if (frame.rgb.empty()) throw DataError("empty frame");
  if (window <= 0) window = model.spec().input_side;
  if (stride <= 0) stride = model.spec().total_stride;
  if (window > frame.width || window > frame.height) {
    throw DataError("window " + std::to_string(window) +
                    " exceeds frame size " + std::to_string(frame.width) + "x" +
                    std::to_string(frame.height));
  }
  GridGeometry geom = GridGeometry::make(frame.width, frame.height, stride, window);
  ClassProbMap map(geom, model.spec().num_classes);
  parallel_for(static_cast<std::size_t>(geom.rows) * geom.cols, jobs,
               [&](std::size_t i) {
                 const int r = static_cast<int>(i) / geom.cols;
                 const int c = static_cast<int>(i) % geom.cols;
                 auto [x0, y0] = geom.cell_window_origin(r, c);
                 ProbVector p = model.classify(crop(frame, x0, y0, window));
                 std::copy(p.begin(), p.end(), map.cell(r, c));
               });
  return map;
}

DenseModel::DenseModel(const DenseModel& o)
    : spec_(o.spec_),
      preproc_(o.preproc_),
      class_names_(o.class_names_),
      backbone_(o.backbone_ ? o.backbone_->clone() : nullptr),
      head_(o.head_) {}

DenseModel& DenseModel::operator=(const DenseModel& o) {
  if (this != &o) {
    spec_ = o.spec_;
    preproc_ = o.preproc_;
    class_names_ = o.class_names_;
    backbone_ = o.backbone_ ? o.backbone_->clone() : nullptr;
    head_ = o.head_;
  }
  return *this;
}

nn::Tensor DenseModel::standardize(const Image& img) const {
  return standardize_image(img, preproc_, spec_.total_stride);
}

std::vector<nn::ParamRef> DenseModel::params() {
  std::vector<nn::ParamRef> out;
  backbone_->collect_params(out);
  head_.collect_params("head", out);
  return out;
}

void DenseModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["kind"] = "dense_model";
  j["backbone"] = spec_.backbone_id;
  j["num_classes"] = spec_.num_classes;
  j["input_side"] = spec_.input_side;
  j["total_stride"] = spec_.total_stride;
  j["class_names"] = class_names_;
  j["preprocessing"]["mean"] = preproc_.mean;
  j["preprocessing"]["stdev"] = preproc_.stdev;

  std::ofstream out(dir / "model.json");
  if (!out) throw DataError("cannot write " + (dir / "model.json").string());
  out << j.dump(2) << "\n";

  auto params = const_cast<DenseModel*>(this)->params();
  nn::save_weights(params, dir / "weights.bin");
}

DenseModel DenseModel::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw DataError("cannot read " + (dir / "model.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model.json: " + std::string(e.what()));
  }
  if (j.value("kind", "") != "dense_model") {
    throw DataError(dir.string() + " does not hold a dense model");
  }
  DenseModel m;
  m.spec_.backbone_id = j.at("backbone").get<std::string>();
  m.spec_.num_classes = j.at("num_classes").get<int>();
  m.spec_.input_side = j.at("input_side").get<int>();
  m.spec_.total_stride = j.at("total_stride").get<int>();
  m.class_names_ = j.at("class_names").get<std::vector<std::string>>();
  for (int c = 0; c < 3; ++c) {
    m.preproc_.mean[c] = j.at("preprocessing").at("mean").at(c).get<float>();
    m.preproc_.stdev[c] = j.at("preprocessing").at("stdev").at(c).get<float>();
  }
  m.backbone_ = nn::make_backbone(m.spec_.backbone_id);
  m.head_ = nn::Conv2d(m.backbone_->feature_dim(), m.spec_.num_classes, 1, 1, 0);
  auto params = m.params();
  nn::load_weights(params, dir / "weights.bin");
  return m;
}

DenseModel convert_to_fully_convolutional(const PatchClassifier& model) {
  DenseModel dm;
  dm.spec_ = model.spec();
  dm.preproc_ = model.preprocessing();
  dm.class_names_ = model.class_names();
  dm.backbone_ = model.backbone().clone();
  dm.head_ = nn::Conv2d(model.head().in_dim, model.head().out_dim, 1, 1, 0);
  // A 1x1 conv weight is (out x in), exactly the linear layout: bit copy.
  dm.head_.weight = model.head().weight;
  dm.head_.bias = model.head().bias;
  return dm;
}

ClassProbMap dense_inference(const DenseModel& model, const Image& frame) {
  if (frame.rgb.empty()) throw DataError("empty frame");
  const int stride = model.spec().total_stride;
  if (frame.width < stride || frame.height < stride) {
    throw DataError("frame smaller than the backbone stride (" +
                    std::to_string(stride) + ")");
  }
  nn::Tensor x = model.standardize(frame);
  nn::Tensor feat = model.backbone().features(x, nullptr);
  nn::Tensor logits = model.head().forward(feat, nullptr);

  GridGeometry geom = GridGeometry::make(frame.width, frame.height, stride,
                                         model.spec().input_side);
  if (logits.h != geom.rows || logits.w != geom.cols) {
    throw NumericalError("dense grid " + std::to_string(logits.h) + "x" +
                         std::to_string(logits.w) + " does not match ceil(" +
                         std::to_string(frame.height) + "/" +
                         std::to_string(stride) + ") x ceil(" +
                         std::to_string(frame.width) + "/" +
                         std::to_string(stride) + ")");
  }

  ClassProbMap map(geom, model.spec().num_classes);
  const int C = map.num_classes;
  Eigen::VectorXf cell_logits(C);
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      for (int k = 0; k < C; ++k) cell_logits[k] = logits.at(k, r, c);
      Eigen::VectorXf p = nn::softmax(cell_logits);
      std::copy(p.data(), p.data() + C, map.cell(r, c));
    }
  }
  return map;
}

}  // namespace gazeattend
