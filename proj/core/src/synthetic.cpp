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
#include "gazeattend/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "gazeattend/errors.hpp"
#include "gazeattend/image.hpp"
#include "gazeattend/rng.hpp"

namespace gazeattend {

namespace {

constexpr int kLayoutRetries = 200;  // per object, within one layout attempt
constexpr int kFrameLayoutRetries = 50;  // whole-frame restarts
constexpr int kGazeRetries = 200;

struct Rgb {
  std::uint8_t r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
  double c = v * s;
  double hp = h * 6.0;
  double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  double m = v - c;
  auto to8 = [](double u) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(u, 0.0, 1.0) * 255));
  };
  return {to8(r + m), to8(g + m), to8(b + m)};
}

struct ClassStyle {
  Rgb primary;
  Rgb secondary;
  int pattern;  // 0 solid, 1 stripes, 2 checker
};

ClassStyle class_style(int cls, std::uint64_t texture_seed) {
  Rng rng(texture_seed * 0x9e3779b97f4a7c15ULL + cls + 1);
  double hue = std::fmod(0.11 + cls * 0.618033988749895 + rng.uniform_real(0, 0.03), 1.0);
  double sat = 0.60 + rng.uniform_real(0.0, 0.2);
  double val = 0.75 + rng.uniform_real(0.0, 0.2);
  ClassStyle st;
  st.primary = hsv_to_rgb(hue, sat, val);
  st.secondary = hsv_to_rgb(hue, sat, val * 0.55);
  st.pattern = cls % 3;  // ignored when the config asks for solid fill
  return st;
}

struct PlacedObject {
  int class_id;
  bool is_ellipse;
  BoundingBox box;

  bool contains(double px, double py) const {
    if (!is_ellipse) return box.contains(px, py);
    double cx = box.x + box.w / 2.0;
    double cy = box.y + box.h / 2.0;
    double dx = (px + 0.5 - cx) / (box.w / 2.0);
    double dy = (py + 0.5 - cy) / (box.h / 2.0);
    return dx * dx + dy * dy <= 1.0;
  }
};

bool boxes_clash(const BoundingBox& a, const BoundingBox& b, int margin) {
  return a.x < b.x + b.w + margin && b.x < a.x + a.w + margin &&
         a.y < b.y + b.h + margin && b.y < a.y + a.h + margin;
}

double shape_area(const PlacedObject& o) {
  double a = static_cast<double>(o.box.w) * o.box.h;
  return o.is_ellipse ? a * M_PI / 4.0 : a;
}

std::string frame_name(const std::string& split, int idx) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05d", split.c_str(), idx);
  return buf;
}

}  // namespace

void SyntheticSceneConfig::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("frame size must be positive");
  if (num_classes < 1) throw ConfigError("need at least one object class");
  if (num_classes > 255) throw ConfigError("at most 255 object classes");
  if (min_objects < 1 || max_objects < min_objects) {
    throw ConfigError("invalid objects-per-frame range");
  }
  if (max_objects > num_classes) {
    throw ConfigError("objects per frame cannot exceed the class count "
                      "(one instance per class)");
  }
  if (!rectangles && !ellipses) throw ConfigError("no shape kind enabled");
  if (min_object_side < 8 || max_object_side < min_object_side) {
    throw ConfigError("invalid object side range");
  }
  if (min_gap < 0) throw ConfigError("min_gap must be >= 0");
  if (max_object_side + 2 * min_gap > std::min(width, height)) {
    throw ConfigError("objects too large for the frame");
  }
  // Worst case shape (ellipse of the minimum box) must still be informative
  // relative to the training patch.
  double min_area = min_object_side * static_cast<double>(min_object_side) *
                    (ellipses ? M_PI / 4.0 : 1.0);
  double need = (patch_side / 4.0) * (patch_side / 4.0);
  if (min_area < need) {
    throw ConfigError("min object area below (patch_side/4)^2");
  }
  if (gaze_jitter < 0) throw ConfigError("gaze jitter must be >= 0");
  if (other_fraction < 0 || other_fraction >= 1) {
    throw ConfigError("other_fraction must lie in [0, 1)");
  }
  if (frames_per_split.empty()) throw ConfigError("no splits configured");
  for (const auto& [name, count] : frames_per_split) {
    if (count < 1) throw ConfigError("split \"" + name + "\" has no frames");
  }
}

SyntheticSceneConfig synthetic_config_from_json_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  SyntheticSceneConfig cfg;
  try {
    if (j.contains("width")) cfg.width = j["width"].get<int>();
    if (j.contains("height")) cfg.height = j["height"].get<int>();
    if (j.contains("num_classes")) cfg.num_classes = j["num_classes"].get<int>();
    if (j.contains("min_objects")) cfg.min_objects = j["min_objects"].get<int>();
    if (j.contains("max_objects")) cfg.max_objects = j["max_objects"].get<int>();
    if (j.contains("rectangles")) cfg.rectangles = j["rectangles"].get<bool>();
    if (j.contains("ellipses")) cfg.ellipses = j["ellipses"].get<bool>();
    if (j.contains("solid_fill")) cfg.solid_fill = j["solid_fill"].get<bool>();
    if (j.contains("texture_seed")) cfg.texture_seed = j["texture_seed"].get<std::uint64_t>();
    if (j.contains("min_object_side")) cfg.min_object_side = j["min_object_side"].get<int>();
    if (j.contains("max_object_side")) cfg.max_object_side = j["max_object_side"].get<int>();
    if (j.contains("min_gap")) cfg.min_gap = j["min_gap"].get<int>();
    if (j.contains("gaze_jitter")) cfg.gaze_jitter = j["gaze_jitter"].get<double>();
    if (j.contains("other_fraction")) cfg.other_fraction = j["other_fraction"].get<double>();
    if (j.contains("patch_side")) cfg.patch_side = j["patch_side"].get<int>();
    if (j.contains("emit_masks")) cfg.emit_masks = j["emit_masks"].get<bool>();
    if (j.contains("frames_per_split")) {
      cfg.frames_per_split.clear();
      for (const auto& [name, count] : j["frames_per_split"].items()) {
        cfg.frames_per_split[name] = count.get<int>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad config field: " + std::string(e.what()));
  }
  cfg.validate();
  return cfg;
}

DatasetManifest generate_synthetic(const SyntheticSceneConfig& cfg,
                                   std::uint64_t seed,
                                   const std::filesystem::path& out_dir) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "images");
  if (cfg.emit_masks) fs::create_directories(out_dir / "masks");

  const int other_class = cfg.num_classes;  // reserved last index
  std::vector<ClassStyle> styles;
  styles.reserve(cfg.num_classes);
  for (int c = 0; c < cfg.num_classes; ++c) {
    styles.push_back(class_style(c, cfg.texture_seed));
  }

  DatasetManifest m;
  m.name = "synthetic";
  for (int c = 0; c < cfg.num_classes; ++c) {
    m.class_names.push_back("obj" + std::to_string(c));
  }
  m.class_names.push_back("other");
  m.frame_width = cfg.width;
  m.frame_height = cfg.height;
  m.base_dir = out_dir;

  Rng rng(seed);
  std::vector<GazeCsvRow> gaze_rows;
  int attended_cycle = 0;  // balances attended classes across frames

  for (const auto& [split, count] : cfg.frames_per_split) {
    for (int idx = 0; idx < count; ++idx) {
      const std::string id = frame_name(split, idx);
      const bool other_frame = rng.bernoulli(cfg.other_fraction);

      // Pick the classes shown in this frame, attended class first.
      int n_objects = rng.uniform_int(cfg.min_objects, cfg.max_objects);
      std::vector<int> classes;
      if (!other_frame) {
        classes.push_back(attended_cycle % cfg.num_classes);
        ++attended_cycle;
      }
      std::vector<int> pool;
      for (int c = 0; c < cfg.num_classes; ++c) {
        if (classes.empty() || c != classes[0]) pool.push_back(c);
      }
      rng.shuffle(pool);
      while (static_cast<int>(classes.size()) < n_objects) {
        classes.push_back(pool.back());
        pool.pop_back();
      }

      // Place non-overlapping shapes. A crowded early placement can block the
      // remaining objects, so the whole layout restarts from scratch when one
      // object exhausts its attempts.
      std::vector<PlacedObject> objects;
      bool layout_done = false;
      for (int pass = 0; pass < kFrameLayoutRetries && !layout_done; ++pass) {
        objects.clear();
        layout_done = true;
        for (int cls : classes) {
          bool placed = false;
          for (int attempt = 0; attempt < kLayoutRetries && !placed; ++attempt) {
            PlacedObject o;
            o.class_id = cls;
            if (cfg.rectangles && cfg.ellipses) {
              o.is_ellipse = rng.bernoulli(0.5);
            } else {
              o.is_ellipse = cfg.ellipses;
            }
            o.box.w = rng.uniform_int(cfg.min_object_side, cfg.max_object_side);
            o.box.h = rng.uniform_int(cfg.min_object_side, cfg.max_object_side);
            o.box.x =
                rng.uniform_int(cfg.min_gap, cfg.width - o.box.w - cfg.min_gap);
            o.box.y =
                rng.uniform_int(cfg.min_gap, cfg.height - o.box.h - cfg.min_gap);
            if (shape_area(o) < (cfg.patch_side / 4.0) * (cfg.patch_side / 4.0)) {
              continue;
            }
            bool clash = false;
            for (const auto& prev : objects) {
              if (boxes_clash(o.box, prev.box, cfg.min_gap)) {
                clash = true;
                break;
              }
            }
            if (!clash) {
              objects.push_back(o);
              placed = true;
            }
          }
          if (!placed) {
            layout_done = false;
            break;
          }
        }
      }
      if (!layout_done) {
        throw DataError("unsatisfiable synthetic layout for frame " + id +
                        ": could not place " + std::to_string(n_objects) +
                        " objects of side <= " +
                        std::to_string(cfg.max_object_side));
      }

      // Gaze placement.
      FrameRecord f;
      f.id = id;
      f.image_path = "images/" + id + ".png";
      if (other_frame) {
        f.attended_class = other_class;
        bool found = false;
        for (int attempt = 0; attempt < kGazeRetries && !found; ++attempt) {
          double gx = rng.uniform_real(0, cfg.width);
          double gy = rng.uniform_real(0, cfg.height);
          bool on_object = false;
          for (const auto& o : objects) {
            BoundingBox padded{o.box.x - 12, o.box.y - 12, o.box.w + 24,
                               o.box.h + 24};
            if (padded.contains(gx, gy)) {
              on_object = true;
              break;
            }
          }
          if (!on_object) {
            f.gaze = {gx, gy};
            found = true;
          }
        }
        if (!found) {
          throw DataError("no background gaze position found for frame " + id);
        }
      } else {
        const PlacedObject& target = objects[0];
        f.attended_class = target.class_id;
        double cx = target.box.x + target.box.w / 2.0;
        double cy = target.box.y + target.box.h / 2.0;
        f.gaze = {cx, cy};
        for (int attempt = 0; attempt < kGazeRetries; ++attempt) {
          double gx = cx + rng.uniform_real(-cfg.gaze_jitter, cfg.gaze_jitter);
          double gy = cy + rng.uniform_real(-cfg.gaze_jitter, cfg.gaze_jitter);
          if (target.contains(gx, gy)) {
            f.gaze = {gx, gy};
            break;
          }
        }
      }

      for (const auto& o : objects) {
        f.gt_boxes.emplace_back(o.class_id, o.box);
      }

      // Render image (and mask).
      Image img;
      img.width = cfg.width;
      img.height = cfg.height;
      img.rgb.resize(static_cast<std::size_t>(cfg.width) * cfg.height * 3);
      std::vector<std::uint8_t> mask(
          static_cast<std::size_t>(cfg.width) * cfg.height,
          static_cast<std::uint8_t>(other_class));
      for (int y = 0; y < cfg.height; ++y) {
        for (int x = 0; x < cfg.width; ++x) {
          std::uint8_t* px = img.px(x, y);
          int base = 52 + rng.uniform_int(-8, 8);
          px[0] = static_cast<std::uint8_t>(std::clamp(base, 0, 255));
          px[1] = static_cast<std::uint8_t>(std::clamp(base, 0, 255));
          px[2] = static_cast<std::uint8_t>(std::clamp(base + 4, 0, 255));
        }
      }
      for (const auto& o : objects) {
        const ClassStyle& st = styles[o.class_id];
        double gain = rng.uniform_real(0.85, 1.15);
        for (int y = o.box.y; y < o.box.y + o.box.h; ++y) {
          for (int x = o.box.x; x < o.box.x + o.box.w; ++x) {
            if (!o.contains(x, y)) continue;
            Rgb col = st.primary;
            if (!cfg.solid_fill) {
              if (st.pattern == 1 && ((x + y) / 12) % 2 == 0) col = st.secondary;
              if (st.pattern == 2 && ((x / 16) + (y / 16)) % 2 == 0) {
                col = st.secondary;
              }
            }
            auto shade = [&](std::uint8_t v) {
              int out = static_cast<int>(std::lround(v * gain)) +
                        rng.uniform_int(-6, 6);
              return static_cast<std::uint8_t>(std::clamp(out, 0, 255));
            };
            std::uint8_t* px = img.px(x, y);
            px[0] = shade(col.r);
            px[1] = shade(col.g);
            px[2] = shade(col.b);
            mask[static_cast<std::size_t>(y) * cfg.width + x] =
                static_cast<std::uint8_t>(o.class_id);
          }
        }
      }
      save_image_png(img, out_dir / f.image_path);
      if (cfg.emit_masks) {
        save_gray_png(mask, cfg.width, cfg.height,
                      out_dir / "masks" / (id + ".png"));
      }

      gaze_rows.push_back({f.id, f.gaze.x, f.gaze.y, f.attended_class});
      m.splits[split].push_back(f.id);
      m.frames.push_back(std::move(f));
    }
  }

  m.validate();
  save_manifest(m, out_dir / "manifest.json");
  save_gaze_csv(gaze_rows, out_dir / "gaze.csv");
  return m;
}

}  // namespace gazeattend
