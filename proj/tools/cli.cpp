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
#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "gazeattend/boxfit.hpp"
#include "gazeattend/classifier.hpp"
#include "gazeattend/denseinfer.hpp"
#include "gazeattend/distill.hpp"
#include "gazeattend/errors.hpp"
#include "gazeattend/image.hpp"
#include "gazeattend/manifest.hpp"
#include "gazeattend/metrics.hpp"
#include "gazeattend/parallel.hpp"
#include "gazeattend/rng.hpp"
#include "gazeattend/synthetic.hpp"
#include "gazeattend/version.hpp"

namespace gazeattend::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

// Artifact directories are created fresh; a non-empty target needs --force.
void ensure_out_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw ConfigError("output " + dir.string() +
                      " already exists; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

// No timestamps: identical configs must produce identical provenance.
void write_provenance(const fs::path& dir, const std::string& subcommand,
                      const ordered_json& config,
                      const std::vector<std::string>& inputs) {
  ordered_json j;
  j["tool"] = "gazeattend";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["config_hash"] = "sha256:" + sha256_hex(config.dump());
  j["inputs"] = inputs;
  std::ofstream out(dir / "provenance.json");
  if (!out) throw DataError("cannot write provenance in " + dir.string());
  out << j.dump(2) << "\n";
}

int effective_jobs(int jobs) { return jobs > 0 ? jobs : default_jobs(); }

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string config, out;
  std::uint64_t seed = 0;
  bool force = false, emit_masks = false;
  int width = 0, height = 0, classes = 0, patch_side = 0;
};

ordered_json synth_config_json(const SyntheticSceneConfig& c) {
  ordered_json j;
  j["width"] = c.width;
  j["height"] = c.height;
  j["num_classes"] = c.num_classes;
  j["min_objects"] = c.min_objects;
  j["max_objects"] = c.max_objects;
  j["rectangles"] = c.rectangles;
  j["ellipses"] = c.ellipses;
  j["solid_fill"] = c.solid_fill;
  j["texture_seed"] = c.texture_seed;
  j["min_object_side"] = c.min_object_side;
  j["max_object_side"] = c.max_object_side;
  j["min_gap"] = c.min_gap;
  j["gaze_jitter"] = c.gaze_jitter;
  j["other_fraction"] = c.other_fraction;
  j["patch_side"] = c.patch_side;
  j["emit_masks"] = c.emit_masks;
  j["frames_per_split"] = c.frames_per_split;
  return j;
}

void cmd_synth(const SynthArgs& a, const CLI::App& sub) {
  SyntheticSceneConfig cfg;
  if (!a.config.empty()) cfg = synthetic_config_from_json_file(a.config);
  if (sub.count("--width")) cfg.width = a.width;
  if (sub.count("--height")) cfg.height = a.height;
  if (sub.count("--classes")) cfg.num_classes = a.classes;
  if (sub.count("--patch-side")) cfg.patch_side = a.patch_side;
  if (sub.count("--emit-masks")) cfg.emit_masks = a.emit_masks;
  cfg.validate();

  ensure_out_dir(a.out, a.force);
  DatasetManifest m = generate_synthetic(cfg, a.seed, a.out);
  ordered_json pj = synth_config_json(cfg);
  pj["seed"] = a.seed;
  write_provenance(a.out, "synth", pj, {});
  std::cout << "wrote " << m.frames.size() << " frames ("
            << m.num_classes() << " classes) to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// train-patch

struct TrainArgs {
  std::string manifest, split = "train", out, config, backbone, init_weights;
  int input_side = 0, batch_size = 0, epochs = 0, patience = 0;
  double lr = 0, momentum = 0, holdout = 0;
  std::uint64_t seed = 0;
  bool class_weighting = false, flip = false, force = false;
};

void cmd_train_patch(const TrainArgs& a, const CLI::App& sub) {
  ClassifierSpec spec;
  TrainConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw ConfigError("cannot open config: " + a.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    spec.backbone_id = j.value("backbone", spec.backbone_id);
    spec.input_side = j.value("input_side", spec.input_side);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.momentum = j.value("momentum", cfg.momentum);
    cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
    cfg.patience = j.value("patience", cfg.patience);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.holdout_fraction = j.value("holdout_fraction", cfg.holdout_fraction);
    cfg.class_weighting = j.value("class_weighting", cfg.class_weighting);
    cfg.horizontal_flip = j.value("horizontal_flip", cfg.horizontal_flip);
  }
  if (sub.count("--backbone")) spec.backbone_id = a.backbone;
  if (sub.count("--input-side")) spec.input_side = a.input_side;
  if (sub.count("--batch-size")) cfg.batch_size = a.batch_size;
  if (sub.count("--lr")) cfg.learning_rate = a.lr;
  if (sub.count("--momentum")) cfg.momentum = a.momentum;
  if (sub.count("--epochs")) cfg.max_epochs = a.epochs;
  if (sub.count("--patience")) cfg.patience = a.patience;
  if (sub.count("--seed")) cfg.seed = a.seed;
  if (sub.count("--holdout")) cfg.holdout_fraction = a.holdout;
  if (sub.count("--class-weighting")) cfg.class_weighting = a.class_weighting;
  if (sub.count("--flip")) cfg.horizontal_flip = a.flip;

  DatasetManifest m = load_manifest(a.manifest);
  spec.num_classes = m.num_classes();

  PatchClassifier model =
      train_patch_classifier(m, a.split, spec, cfg, a.init_weights);
  ensure_out_dir(a.out, a.force);
  model.save(a.out);

  ordered_json pj;
  pj["backbone"] = spec.backbone_id;
  pj["num_classes"] = spec.num_classes;
  pj["input_side"] = spec.input_side;
  pj["split"] = a.split;
  pj["batch_size"] = cfg.batch_size;
  pj["learning_rate"] = cfg.learning_rate;
  pj["momentum"] = cfg.momentum;
  pj["max_epochs"] = cfg.max_epochs;
  pj["patience"] = cfg.patience;
  pj["seed"] = cfg.seed;
  pj["holdout_fraction"] = cfg.holdout_fraction;
  pj["class_weighting"] = cfg.class_weighting;
  pj["horizontal_flip"] = cfg.horizontal_flip;
  pj["init_weights"] = a.init_weights;
  write_provenance(a.out, "train-patch", pj, {a.manifest});

  const TrainLog& log = model.train_log();
  std::cout << "trained " << spec.backbone_id << " for " << log.epochs_run
            << " epochs (best epoch " << log.best_epoch << ", holdout loss "
            << log.best_holdout_loss << ", train accuracy "
            << log.final_train_accuracy << ")\n"
            << "model saved to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
  std::string model, out;
  bool force = false;
};

void cmd_convert(const ConvertArgs& a) {
  fs::path out = a.out;
  bool cache_mode = false;
  if (out.empty()) {
    const char* cache = std::getenv("GAZEATTEND_CACHE");
    if (cache == nullptr || *cache == '\0') {
      throw ConfigError("convert needs --out or the GAZEATTEND_CACHE variable");
    }
    // Key the cache entry by the source weights so retraining invalidates it.
    const std::string key =
        sha256_hex(fs::path(a.model) / "weights.bin").substr(0, 16);
    out = fs::path(cache) / ("dense-" + key);
    cache_mode = true;
  }
  if (cache_mode && fs::exists(out / "model.json") && !a.force) {
    std::cout << "cache hit\n" << out.string() << "\n";
    return;
  }
  PatchClassifier model = PatchClassifier::load(a.model);
  DenseModel dense = convert_to_fully_convolutional(model);
  ensure_out_dir(out, a.force || cache_mode);
  dense.save(out);
  ordered_json pj;
  pj["model"] = a.model;
  write_provenance(out, "convert", pj, {a.model});
  std::cout << out.string() << "\n";
}

// ---------------------------------------------------------------------------
// infer

struct InferArgs {
  std::string mode, model, manifest, split = "test", out;
  int window = 0, stride = 0, jobs = 0, distill_n = 0;
  std::uint64_t distill_seed = 0;
  bool force = false, masks = false;
};

void cmd_infer(const InferArgs& a) {
  DatasetManifest m = load_manifest(a.manifest);
  std::vector<const FrameRecord*> frames = m.split_frames(a.split);
  if (a.distill_n > 0) {
    if (a.split != "train") {
      throw ConfigError("--distill-n applies to the train split only");
    }
    DistillSelection sel = select_distill_frames(m, a.distill_n, a.distill_seed);
    if (sel.saturated) {
      std::cerr << "warning: only " << sel.frame_ids.size()
                << " qualifying frames (asked for " << a.distill_n << ")\n";
    }
    frames.clear();
    for (const auto& id : sel.frame_ids) frames.push_back(m.find_frame(id));
  }
  if (frames.empty()) throw DataError("no frames to infer");

  ensure_out_dir(a.out, a.force);
  const int jobs = effective_jobs(a.jobs);

  std::optional<PatchClassifier> patch_model;
  std::optional<DenseModel> dense_model;
  if (a.mode == "sliding") {
    patch_model = PatchClassifier::load(a.model);
  } else {
    dense_model = DenseModel::load(a.model);
  }

  for (const auto* f : frames) {
    Image img = load_image(m.resolve_image(*f));
    ClassProbMap map =
        a.mode == "sliding"
            ? sliding_window_inference(*patch_model, img, a.window, a.stride, jobs)
            : dense_inference(*dense_model, img);
    save_prob_map(map, fs::path(a.out) / (f->id + ".cpm"));
    if (a.masks) {
      save_mask(upsample_to_mask(map), fs::path(a.out) / (f->id + ".png"));
    }
  }

  ordered_json pj;
  pj["mode"] = a.mode;
  pj["model"] = a.model;
  pj["split"] = a.split;
  pj["window"] = a.window;
  pj["stride"] = a.stride;
  pj["distill_n"] = a.distill_n;
  pj["distill_seed"] = a.distill_seed;
  write_provenance(a.out, "infer", pj, {a.manifest, a.model});
  std::cout << "wrote " << frames.size() << " maps to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// distill

struct DistillArgs {
  std::string model, teachers, manifest, out;
  int n = kDefaultDistillFrames, batch = 1, epochs = 20, patience = 3, jobs = 0;
  double lr = 1e-3, momentum = 0.9;
  std::uint64_t seed = 0;
  bool reverse_kl = false, force = false;
};

void cmd_distill(const DistillArgs& a) {
  DenseModel model = DenseModel::load(a.model);
  DatasetManifest m = load_manifest(a.manifest);
  TeacherSet teachers = load_teacher_set(a.teachers);
  if (static_cast<int>(teachers.maps.size()) > a.n) {
    // Deterministic subsample of the available teacher maps.
    std::vector<std::size_t> idx(teachers.maps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(a.seed);
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(a.n));
    std::sort(idx.begin(), idx.end());
    TeacherSet subset;
    for (std::size_t i : idx) subset.maps.push_back(std::move(teachers.maps[i]));
    teachers = std::move(subset);
  }

  DistillConfig cfg;
  cfg.num_frames = a.n;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.momentum = a.momentum;
  cfg.max_epochs = a.epochs;
  cfg.patience = a.patience;
  cfg.seed = a.seed;
  cfg.teacher_first = !a.reverse_kl;

  DistillResult result =
      finetune_kl(model, teachers, m, cfg, effective_jobs(a.jobs));

  ensure_out_dir(a.out, a.force);
  result.model.save(a.out);
  ordered_json pj;
  pj["model"] = a.model;
  pj["teachers"] = a.teachers;
  pj["n"] = a.n;
  pj["batch_size"] = cfg.batch_size;
  pj["learning_rate"] = cfg.learning_rate;
  pj["momentum"] = cfg.momentum;
  pj["max_epochs"] = cfg.max_epochs;
  pj["patience"] = cfg.patience;
  pj["seed"] = cfg.seed;
  pj["teacher_first"] = cfg.teacher_first;
  write_provenance(a.out, "distill", pj, {a.manifest, a.model, a.teachers});

  ordered_json lj;
  lj["frames"] = teachers.maps.size();
  lj["initial_kl"] = result.initial_kl;
  lj["best_kl"] = result.best_kl;
  lj["best_epoch"] = result.best_epoch;
  lj["epoch_kl"] = result.epoch_kl;
  std::ofstream log(fs::path(a.out) / "distill_log.json");
  log << lj.dump(2) << "\n";

  std::cout << "distilled on " << teachers.maps.size() << " frames: mean KL "
            << result.initial_kl << " -> " << result.best_kl << " (best epoch "
            << result.best_epoch << ")\n"
            << "model saved to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// fit-boxes

struct FitArgs {
  std::string maps, manifest, split = "test", out, from_detections;
  int neighborhood = kGazeNeighborhood;
  bool median = false, force = false;
};

void cmd_fit_boxes(const FitArgs& a) {
  DatasetManifest m = load_manifest(a.manifest);
  const int other = m.other_index();
  std::vector<FrameDetections> out_dets;
  int skipped = 0;

  if (!a.from_detections.empty()) {
    // Supervised-baseline selection over externally produced detections.
    for (const auto& frame : load_detections_jsonl(a.from_detections)) {
      const FrameRecord* rec = m.find_frame(frame.frame_id);
      if (rec == nullptr) {
        throw DataError("detections reference unknown frame " + frame.frame_id);
      }
      FrameDetections fd;
      fd.frame_id = frame.frame_id;
      if (rec->gaze.valid_in(m.frame_width, m.frame_height)) {
        if (auto det = select_gaze_box(frame.detections, rec->gaze)) {
          fd.detections.push_back(*det);
        }
      } else {
        ++skipped;
      }
      out_dets.push_back(std::move(fd));
    }
  } else {
    if (a.maps.empty()) {
      throw ConfigError("fit-boxes needs --maps or --from-detections");
    }
    const NeighborhoodStat stat =
        a.median ? NeighborhoodStat::kMedian : NeighborhoodStat::kMode;
    for (const auto* f : m.split_frames(a.split)) {
      const fs::path map_path = fs::path(a.maps) / (f->id + ".cpm");
      if (!fs::exists(map_path)) {
        throw DataError("missing map for frame " + f->id + ": " +
                        map_path.string());
      }
      FrameDetections fd;
      fd.frame_id = f->id;
      if (f->gaze.valid_in(m.frame_width, m.frame_height)) {
        ClassProbMap map = load_prob_map(map_path);
        if (auto det = detect_attended(map, f->gaze, other, a.neighborhood, stat)) {
          fd.detections.push_back(*det);
        }
      } else {
        ++skipped;
      }
      out_dets.push_back(std::move(fd));
    }
  }

  ensure_out_dir(a.out, a.force);
  save_detections_jsonl(out_dets, fs::path(a.out) / "detections.jsonl");
  ordered_json pj;
  pj["maps"] = a.maps;
  pj["from_detections"] = a.from_detections;
  pj["split"] = a.split;
  pj["neighborhood"] = a.neighborhood;
  pj["median"] = a.median;
  write_provenance(a.out, "fit-boxes", pj, {a.manifest});

  int with_det = 0;
  for (const auto& fd : out_dets) with_det += fd.detections.empty() ? 0 : 1;
  std::cout << "fitted boxes for " << out_dets.size() << " frames ("
            << with_det << " detections";
  if (skipped > 0) std::cout << ", " << skipped << " frames with invalid gaze";
  std::cout << ") -> " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvalArgs {
  std::string detections, manifest, split = "test", out;
  bool force = false;
};

void cmd_evaluate(const EvalArgs& a) {
  DatasetManifest m = load_manifest(a.manifest);
  fs::path det_path = a.detections;
  if (fs::is_directory(det_path)) det_path /= "detections.jsonl";
  std::vector<FrameDetections> dets = load_detections_jsonl(det_path);
  AttendedGts gts = attended_gt_from_manifest(m, a.split);
  EvalReport report = map_metrics(dets, gts, m.num_classes(), m.other_index());

  ensure_out_dir(a.out, a.force);
  save_report_json(report, fs::path(a.out) / "report.json");
  save_per_class_csv(report, fs::path(a.out) / "per_class.csv");
  ordered_json pj;
  pj["detections"] = det_path.string();
  pj["split"] = a.split;
  write_provenance(a.out, "evaluate", pj, {a.manifest, det_path.string()});
  std::cout << "mAP " << report.map << "  mAP50 " << report.map50 << " over "
            << gts.size() << " ground-truth frames -> " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string model, manifest, split = "test", out;
  int frames = 5, repetitions = 1, warmup = 1, jobs = 1;
  bool force = false;
};

void cmd_bench(const BenchArgs& a) {
  PatchClassifier model = PatchClassifier::load(a.model);
  DenseModel dense = convert_to_fully_convolutional(model);
  DatasetManifest m = load_manifest(a.manifest);
  auto frame_recs = m.split_frames(a.split);
  if (frame_recs.empty()) throw DataError("split has no frames");

  std::vector<Image> images;
  for (const auto* f : frame_recs) {
    if (static_cast<int>(images.size()) >= a.frames) break;
    images.push_back(load_image(m.resolve_image(*f)));
  }

  const int jobs = effective_jobs(a.jobs);
  const int window = model.spec().input_side;
  // Both strides are reported: 32 aligns with the dense grid; 30 approximates
  // a ~90% patch overlap at the 300-pixel window.
  std::vector<TimedMethod> methods = {
      {"sliding_stride32",
       [&](std::size_t i) {
         sliding_window_inference(model, images[i], window, 32, jobs);
       }},
      {"sliding_stride30",
       [&](std::size_t i) {
         sliding_window_inference(model, images[i], window, 30, jobs);
       }},
      {"dense",
       [&](std::size_t i) { dense_inference(dense, images[i]); }},
  };
  auto timing =
      timing_benchmark(methods, images.size(), a.repetitions, a.warmup);

  ensure_out_dir(a.out, a.force);
  ordered_json tj;
  for (const auto& [name, secs] : timing) tj[name] = secs;
  tj["ratio_sliding32_over_dense"] = timing["sliding_stride32"] / timing["dense"];
  std::ofstream tout(fs::path(a.out) / "timing.json");
  tout << tj.dump(2) << "\n";

  ordered_json pj;
  pj["model"] = a.model;
  pj["split"] = a.split;
  pj["frames"] = static_cast<int>(images.size());
  pj["repetitions"] = a.repetitions;
  pj["warmup"] = a.warmup;
  pj["jobs"] = jobs;
  write_provenance(a.out, "bench", pj, {a.manifest, a.model});

  for (const auto& [name, secs] : timing) {
    std::cout << name << ": " << secs << " s/frame\n";
  }
  std::cout << "sliding(32)/dense ratio: "
            << timing["sliding_stride32"] / timing["dense"] << "\n";
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> inputs, names;
  std::string out;
  bool force = false;
};

void cmd_report(const ReportArgs& a) {
  if (a.inputs.empty()) throw ConfigError("report needs at least one --inputs");
  if (!a.names.empty() && a.names.size() != a.inputs.size()) {
    throw ConfigError("--names count must match --inputs");
  }
  ordered_json methods = ordered_json::object();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    fs::path p = a.inputs[i];
    if (fs::is_directory(p)) p /= "report.json";
    EvalReport r = load_report_json(p);
    std::string name =
        i < a.names.size() ? a.names[i] : p.parent_path().filename().string();
    labels.push_back(name);
    ordered_json e;
    e["map"] = r.map;
    e["map50"] = r.map50;
    e["num_frames"] = r.num_frames;
    e["timing"] = r.timing;
    methods[name] = e;
  }

  ensure_out_dir(a.out, a.force);
  ordered_json j;
  j["methods"] = methods;
  std::ofstream out(fs::path(a.out) / "comparison.json");
  out << j.dump(2) << "\n";
  std::ofstream csv(fs::path(a.out) / "comparison.csv");
  csv << "method,map,map50\n";
  for (const auto& name : labels) {
    csv << name << "," << methods[name]["map"].get<double>() << ","
        << methods[name]["map50"].get<double>() << "\n";
  }
  ordered_json pj;
  pj["inputs"] = a.inputs;
  pj["names"] = a.names;
  write_provenance(a.out, "report", pj, a.inputs);
  std::cout << "method,map,map50\n";
  for (const auto& name : labels) {
    std::cout << name << "," << methods[name]["map"].get<double>() << ","
              << methods[name]["map50"].get<double>() << "\n";
  }
}

// ---------------------------------------------------------------------------
// fetch

struct FetchArgs {
  std::string file, sha256;
};

void cmd_fetch(const FetchArgs& a) {
  std::cout << "The museum dataset and pretrained weights are distributed by "
               "the original authors:\n"
               "  https://iplab.dmi.unict.it/WS_OBJ_DET/\n"
               "Download them manually, then verify files with\n"
               "  gazeattend fetch --file PATH --sha256 HEX\n";
  if (a.file.empty()) return;
  if (a.sha256.empty()) throw ConfigError("--file needs --sha256");
  std::string actual = sha256_hex(fs::path(a.file));
  std::string expect = a.sha256;
  std::transform(expect.begin(), expect.end(), expect.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (actual != expect) {
    throw DataError("checksum mismatch for " + a.file + "\n  expected " +
                    expect + "\n  actual   " + actual);
  }
  std::cout << "checksum OK: " << a.file << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Attended-object detection from gaze supervision"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  s_synth->add_option("--config", synth.config, "Scene config JSON");
  s_synth->add_option("--seed", synth.seed, "Generator seed");
  s_synth->add_option("--out", synth.out, "Output dataset directory")->required();
  s_synth->add_flag("--force", synth.force, "Overwrite a non-empty output");
  s_synth->add_option("--width", synth.width, "Frame width override");
  s_synth->add_option("--height", synth.height, "Frame height override");
  s_synth->add_option("--classes", synth.classes, "Object class count override");
  s_synth->add_option("--patch-side", synth.patch_side, "Patch side override");
  s_synth->add_flag("--emit-masks", synth.emit_masks, "Also write class masks");
  s_synth->callback([&] { cmd_synth(synth, *s_synth); });

  TrainArgs train;
  auto* s_train = app.add_subcommand("train-patch", "Train the gaze-patch classifier");
  s_train->add_option("--manifest", train.manifest, "Dataset manifest")->required();
  s_train->add_option("--split", train.split, "Training split");
  s_train->add_option("--out", train.out, "Model output directory")->required();
  s_train->add_option("--config", train.config, "Training config JSON");
  s_train->add_option("--backbone", train.backbone, "tiny | resnet18");
  s_train->add_option("--input-side", train.input_side, "Patch side in pixels");
  s_train->add_option("--batch-size", train.batch_size, "SGD batch size");
  s_train->add_option("--lr", train.lr, "Learning rate");
  s_train->add_option("--momentum", train.momentum, "SGD momentum");
  s_train->add_option("--epochs", train.epochs, "Max epochs");
  s_train->add_option("--patience", train.patience, "Early-stop patience");
  s_train->add_option("--seed", train.seed, "Training seed");
  s_train->add_option("--holdout", train.holdout, "Holdout fraction");
  s_train->add_flag("--class-weighting", train.class_weighting,
                    "Weight the loss by inverse class frequency");
  s_train->add_flag("--flip", train.flip, "Random horizontal flips");
  s_train->add_option("--init-weights", train.init_weights,
                      "Start from a weights file (missing tensors keep init)");
  s_train->add_flag("--force", train.force, "Overwrite a non-empty output");
  s_train->callback([&] { cmd_train_patch(train, *s_train); });

  ConvertArgs convert;
  auto* s_convert = app.add_subcommand(
      "convert", "Rewire the trained classifier as a fully convolutional model");
  s_convert->add_option("--model", convert.model, "Patch classifier directory")
      ->required();
  s_convert->add_option("--out", convert.out,
                        "Output directory (defaults to GAZEATTEND_CACHE)");
  s_convert->add_flag("--force", convert.force, "Overwrite a non-empty output");
  s_convert->callback([&] { cmd_convert(convert); });

  InferArgs infer;
  auto* s_infer = app.add_subcommand("infer", "Produce coarse class maps");
  s_infer->add_option("--mode", infer.mode, "sliding | dense")
      ->required()
      ->check(CLI::IsMember({"sliding", "dense"}));
  s_infer->add_option("--model", infer.model, "Model directory")->required();
  s_infer->add_option("--manifest", infer.manifest, "Dataset manifest")->required();
  s_infer->add_option("--split", infer.split, "Split to infer");
  s_infer->add_option("--out", infer.out, "Output map directory")->required();
  s_infer->add_option("--window", infer.window, "Sliding window (0 = model side)");
  s_infer->add_option("--stride", infer.stride, "Sliding stride (0 = model stride)");
  s_infer->add_option("--jobs", infer.jobs, "Worker threads (0 = hardware)");
  s_infer->add_option("--distill-n", infer.distill_n,
                      "Restrict to n seeded distillation frames (train split)");
  s_infer->add_option("--distill-seed", infer.distill_seed, "Selection seed");
  s_infer->add_flag("--masks", infer.masks, "Also write upsampled masks");
  s_infer->add_flag("--force", infer.force, "Overwrite a non-empty output");
  s_infer->callback([&] { cmd_infer(infer); });

  DistillArgs distill;
  auto* s_distill = app.add_subcommand(
      "distill", "Finetune the dense model against sliding-window teachers");
  s_distill->add_option("--model", distill.model, "Dense model directory")
      ->required();
  s_distill->add_option("--teachers", distill.teachers, "Teacher map directory")
      ->required();
  s_distill->add_option("--manifest", distill.manifest, "Dataset manifest")
      ->required();
  s_distill->add_option("--n", distill.n, "Max teacher frames");
  s_distill->add_option("--batch", distill.batch, "Frames per SGD step");
  s_distill->add_option("--lr", distill.lr, "Learning rate");
  s_distill->add_option("--momentum", distill.momentum, "SGD momentum");
  s_distill->add_option("--epochs", distill.epochs, "Max epochs");
  s_distill->add_option("--patience", distill.patience, "Early-stop patience");
  s_distill->add_option("--seed", distill.seed, "Shuffle/subsample seed");
  s_distill->add_flag("--reverse-kl", distill.reverse_kl,
                      "Student-first KL direction");
  s_distill->add_option("--jobs", distill.jobs, "Worker threads for evaluation");
  s_distill->add_option("--out", distill.out, "Output model directory")->required();
  s_distill->add_flag("--force", distill.force, "Overwrite a non-empty output");
  s_distill->callback([&] { cmd_distill(distill); });

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit-boxes",
                                   "Turn coarse maps into attended-object boxes");
  s_fit->add_option("--maps", fit.maps, "Coarse map directory");
  s_fit->add_option("--manifest", fit.manifest, "Dataset manifest")->required();
  s_fit->add_option("--split", fit.split, "Split to process");
  s_fit->add_option("--out", fit.out, "Output directory")->required();
  s_fit->add_option("--neighborhood", fit.neighborhood,
                    "Gaze neighborhood side in pixels");
  s_fit->add_flag("--median", fit.median,
                  "Median class statistic instead of the mode");
  s_fit->add_option("--from-detections", fit.from_detections,
                    "Select the gaze box from existing detections instead");
  s_fit->add_flag("--force", fit.force, "Overwrite a non-empty output");
  s_fit->callback([&] { cmd_fit_boxes(fit); });

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("evaluate", "Score detections with mAP/mAP50");
  s_eval->add_option("--detections", eval.detections,
                     "detections.jsonl file or its directory")
      ->required();
  s_eval->add_option("--manifest", eval.manifest, "Dataset manifest")->required();
  s_eval->add_option("--split", eval.split, "Ground-truth split");
  s_eval->add_option("--out", eval.out, "Report output directory")->required();
  s_eval->add_flag("--force", eval.force, "Overwrite a non-empty output");
  s_eval->callback([&] { cmd_evaluate(eval); });

  BenchArgs bench;
  auto* s_bench = app.add_subcommand("bench", "Time sliding vs dense inference");
  s_bench->add_option("--model", bench.model, "Patch classifier directory")
      ->required();
  s_bench->add_option("--manifest", bench.manifest, "Dataset manifest")->required();
  s_bench->add_option("--split", bench.split, "Frame source split");
  s_bench->add_option("--frames", bench.frames, "Frames to time");
  s_bench->add_option("--repetitions", bench.repetitions, "Timed passes");
  s_bench->add_option("--warmup", bench.warmup, "Discarded warmup passes");
  s_bench->add_option("--jobs", bench.jobs, "Worker threads for sliding cells");
  s_bench->add_option("--out", bench.out, "Output directory")->required();
  s_bench->add_flag("--force", bench.force, "Overwrite a non-empty output");
  s_bench->callback([&] { cmd_bench(bench); });

  ReportArgs report;
  auto* s_report = app.add_subcommand("report", "Merge evaluation reports");
  s_report->add_option("--inputs", report.inputs,
                       "report.json files or their directories");
  s_report->add_option("--names", report.names, "Labels matching --inputs");
  s_report->add_option("--out", report.out, "Output directory")->required();
  s_report->add_flag("--force", report.force, "Overwrite a non-empty output");
  s_report->callback([&] { cmd_report(report); });

  FetchArgs fetch;
  auto* s_fetch = app.add_subcommand(
      "fetch", "Print the dataset source and verify downloaded files");
  s_fetch->add_option("--file", fetch.file, "Downloaded file to verify");
  s_fetch->add_option("--sha256", fetch.sha256, "Expected SHA-256 (hex)");
  s_fetch->callback([&] { cmd_fetch(fetch); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gazeattend::cli
