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
#include "gazeattend/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include <json.hpp>

#include "gazeattend/errors.hpp"

namespace gazeattend {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  const std::int64_t iw = std::max(0, x1 - x0);
  const std::int64_t ih = std::max(0, y1 - y0);
  const std::int64_t inter = iw * ih;
  const std::int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

AttendedGts attended_gt_from_manifest(const DatasetManifest& m,
                                      const std::string& split) {
  const int other = m.other_index();
  AttendedGts gts;
  for (const auto* f : m.split_frames(split)) {
    if (f->attended_class == other) continue;
    const BoundingBox* chosen = nullptr;
    for (const auto& [cls, box] : f->gt_boxes) {
      if (cls != f->attended_class) continue;
      if (chosen == nullptr) chosen = &box;
      if (box.contains(f->gaze.x, f->gaze.y)) {
        chosen = &box;
        break;
      }
    }
    if (chosen != nullptr) {
      gts.emplace(f->id, GroundTruthBox{f->attended_class, *chosen});
    }
  }
  return gts;
}

namespace {

struct ScoredDet {
  double score;
  std::string frame_id;
  BoundingBox box;
  std::size_t order;  // original position, as the final tie break
};

// Area under the 101-point interpolated precision-recall curve.
double interpolated_ap(const std::vector<bool>& tp_flags, int num_positives) {
  std::vector<double> precision, recall;
  int tp = 0, fp = 0;
  for (bool is_tp : tp_flags) {
    is_tp ? ++tp : ++fp;
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / num_positives);
  }
  double ap = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    double best = 0.0;
    for (std::size_t k = 0; k < recall.size(); ++k) {
      if (recall[k] >= r) best = std::max(best, precision[k]);
    }
    ap += best;
  }
  return ap / 101.0;
}

}  // namespace

std::optional<double> average_precision(const std::vector<FrameDetections>& dets,
                                        const AttendedGts& gts, int class_id,
                                        double iou_threshold) {
  std::set<std::string> seen;
  for (const auto& f : dets) {
    if (!seen.insert(f.frame_id).second) {
      throw DataError("duplicate frame id in detections: " + f.frame_id);
    }
  }

  int num_positives = 0;
  for (const auto& [id, gt] : gts) {
    if (gt.class_id == class_id) ++num_positives;
  }
  if (num_positives == 0) return std::nullopt;

  std::vector<ScoredDet> scored;
  for (const auto& f : dets) {
    for (const auto& d : f.detections) {
      if (d.class_id == class_id) {
        scored.push_back({d.score, f.frame_id, d.box, scored.size()});
      }
    }
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredDet& a, const ScoredDet& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
    return a.order < b.order;
  });

  std::vector<bool> tp_flags;
  std::set<std::string> matched;  // one ground truth per frame
  for (const auto& d : scored) {
    auto it = gts.find(d.frame_id);
    const bool is_tp = it != gts.end() && it->second.class_id == class_id &&
                       iou(d.box, it->second.box) >= iou_threshold &&
                       matched.insert(d.frame_id).second;
    tp_flags.push_back(is_tp);
  }
  return interpolated_ap(tp_flags, num_positives);
}

EvalReport map_metrics(const std::vector<FrameDetections>& dets,
                       const AttendedGts& gts, int num_classes,
                       int other_index) {
  if (gts.empty()) throw DataError("no ground truth to evaluate against");
  EvalReport report;
  report.num_frames = static_cast<int>(dets.size());
  double sum_ap = 0.0, sum_ap50 = 0.0;
  for (int cls = 0; cls < num_classes; ++cls) {
    if (cls == other_index) continue;
    auto ap50 = average_precision(dets, gts, cls, 0.50);
    if (!ap50) continue;  // class absent from the ground truth
    double mean = 0.0;
    for (int i = 0; i < 10; ++i) {
      mean += *average_precision(dets, gts, cls, 0.50 + 0.05 * i);
    }
    mean /= 10.0;
    report.per_class[cls] = {mean, *ap50};
    sum_ap += mean;
    sum_ap50 += *ap50;
  }
  if (!report.per_class.empty()) {
    report.map = sum_ap / static_cast<double>(report.per_class.size());
    report.map50 = sum_ap50 / static_cast<double>(report.per_class.size());
  }
  return report;
}

void save_report_json(const EvalReport& report,
                      const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["map"] = report.map;
  j["map50"] = report.map50;
  j["num_frames"] = report.num_frames;
  j["per_class"] = nlohmann::ordered_json::object();
  for (const auto& [cls, ap] : report.per_class) {
    j["per_class"][std::to_string(cls)] = {{"ap", ap.ap}, {"ap50", ap.ap50}};
  }
  j["timing"] = report.timing;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << j.dump(2) << "\n";
}

EvalReport load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read report: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad report JSON: " + std::string(e.what()));
  }
  EvalReport report;
  try {
    report.map = j.at("map").get<double>();
    report.map50 = j.at("map50").get<double>();
    report.num_frames = j.at("num_frames").get<int>();
    for (const auto& [key, val] : j.at("per_class").items()) {
      report.per_class[std::stoi(key)] = {val.at("ap").get<double>(),
                                          val.at("ap50").get<double>()};
    }
    if (j.contains("timing")) {
      for (const auto& [key, val] : j["timing"].items()) {
        report.timing[key] = val.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad report field: " + std::string(e.what()));
  }
  return report;
}

void save_per_class_csv(const EvalReport& report,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv: " + path.string());
  out << "metric";
  for (const auto& [cls, ap] : report.per_class) out << ",class_" << cls;
  out << ",all\n";
  out << "ap";
  for (const auto& [cls, ap] : report.per_class) out << "," << ap.ap;
  out << "," << report.map << "\n";
  out << "ap50";
  for (const auto& [cls, ap] : report.per_class) out << "," << ap.ap50;
  out << "," << report.map50 << "\n";
}

std::map<std::string, double> timing_benchmark(
    const std::vector<TimedMethod>& methods, std::size_t num_frames,
    int repetitions, int warmup) {
  if (num_frames == 0) throw ConfigError("timing needs at least one frame");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  warmup = std::max(1, warmup);

  std::map<std::string, double> out;
  for (const auto& method : methods) {
    for (int w = 0; w < warmup; ++w) {
      for (std::size_t i = 0; i < num_frames; ++i) method.run(i);
    }
    const auto start = std::chrono::steady_clock::now();
    for (int rep = 0; rep < repetitions; ++rep) {
      for (std::size_t i = 0; i < num_frames; ++i) method.run(i);
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    out[method.name] =
        elapsed.count() / (static_cast<double>(repetitions) * num_frames);
  }
  return out;
}

ClassifierEval confusion_report(const PatchClassifier& model,
                                const DatasetManifest& manifest,
                                const std::string& split,
                                const std::filesystem::path& csv_path,
                                int jobs) {
  ClassifierEval eval = evaluate_classifier(model, manifest, split, jobs);
  save_confusion_csv(eval, model.class_names(), csv_path);
  return eval;
}

void save_confusion_csv(const ClassifierEval& eval,
                        const std::vector<std::string>& class_names,
                        const std::filesystem::path& path) {
  if (static_cast<int>(class_names.size()) != eval.num_classes) {
    throw DataError("class name count does not match the confusion matrix");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv: " + path.string());
  out << "true\\pred";
  for (const auto& name : class_names) out << "," << name;
  out << ",recall\n";
  for (int t = 0; t < eval.num_classes; ++t) {
    out << class_names[t];
    for (int p = 0; p < eval.num_classes; ++p) out << "," << eval.at(t, p);
    out << "," << eval.recall[t] << "\n";
  }
  out << "precision";
  for (int p = 0; p < eval.num_classes; ++p) out << "," << eval.precision[p];
  out << ",\n";
}

}  // namespace gazeattend
