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
#include "gazeattend/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "gazeattend/errors.hpp"

namespace gazeattend {

using json = nlohmann::ordered_json;

int DatasetManifest::other_index() const {
  for (int i = 0; i < num_classes(); ++i) {
    if (class_names[i] == "other") return i;
  }
  throw DataError("manifest has no \"other\" class");
}

const FrameRecord* DatasetManifest::find_frame(const std::string& id) const {
  for (const auto& f : frames) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

std::vector<const FrameRecord*> DatasetManifest::split_frames(
    const std::string& split) const {
  auto it = splits.find(split);
  if (it == splits.end()) {
    throw DataError("unknown split: " + split);
  }
  std::unordered_map<std::string, const FrameRecord*> by_id;
  by_id.reserve(frames.size());
  for (const auto& f : frames) by_id.emplace(f.id, &f);
  std::vector<const FrameRecord*> out;
  out.reserve(it->second.size());
  for (const auto& id : it->second) {
    auto fit = by_id.find(id);
    if (fit == by_id.end()) {
      throw DataError("split \"" + split + "\" references unknown frame: " + id);
    }
    out.push_back(fit->second);
  }
  return out;
}

std::filesystem::path DatasetManifest::resolve_image(
    const FrameRecord& f) const {
  std::filesystem::path p(f.image_path);
  if (p.is_absolute()) return p;
  return base_dir / p;
}

void DatasetManifest::validate() const {
  if (frame_width <= 0 || frame_height <= 0) {
    throw DataError("manifest frame size must be positive");
  }
  if (num_classes() < 2) {
    throw DataError("manifest needs at least 2 classes");
  }
  int others = 0;
  for (const auto& n : class_names) {
    if (n == "other") ++others;
  }
  if (others != 1) {
    throw DataError("manifest must contain exactly one \"other\" class, got " +
                    std::to_string(others));
  }

  std::unordered_set<std::string> ids;
  for (const auto& f : frames) {
    if (!ids.insert(f.id).second) {
      throw DataError("duplicate frame id: " + f.id);
    }
    if (f.attended_class < 0 || f.attended_class >= num_classes()) {
      throw DataError("frame " + f.id + ": unknown class index " +
                      std::to_string(f.attended_class));
    }
    for (const auto& [cls, box] : f.gt_boxes) {
      if (cls < 0 || cls >= num_classes()) {
        throw DataError("frame " + f.id + ": unknown box class index " +
                        std::to_string(cls));
      }
      if (!box.inside_frame(frame_width, frame_height)) {
        throw DataError("frame " + f.id + ": box outside frame bounds");
      }
    }
  }
  for (const auto& [name, members] : splits) {
    for (const auto& id : members) {
      if (!ids.count(id)) {
        throw DataError("split \"" + name + "\" references unknown frame: " + id);
      }
    }
  }
  auto train = splits.find("train");
  auto test = splits.find("test");
  if (train != splits.end() && test != splits.end()) {
    std::set<std::string> train_ids(train->second.begin(), train->second.end());
    for (const auto& id : test->second) {
      if (train_ids.count(id)) {
        throw DataError("overlapping splits: frame " + id +
                        " is in both train and test");
      }
    }
  }
}

namespace {

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["name"] = m.name;
  j["classes"] = m.class_names;
  j["frame_size"] = {m.frame_width, m.frame_height};
  json splits = json::object();
  for (const auto& [name, members] : m.splits) splits[name] = members;
  j["splits"] = splits;
  json frames = json::array();
  for (const auto& f : m.frames) {
    json jf;
    jf["id"] = f.id;
    jf["image"] = f.image_path;
    jf["gaze"] = {f.gaze.x, f.gaze.y};
    jf["attended"] = f.attended_class;
    if (!f.gt_boxes.empty()) {
      json boxes = json::array();
      for (const auto& [cls, b] : f.gt_boxes) {
        boxes.push_back({cls, b.x, b.y, b.w, b.h});
      }
      jf["boxes"] = boxes;
    }
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.class_names = j.at("classes").get<std::vector<std::string>>();
    m.frame_width = j.at("frame_size").at(0).get<int>();
    m.frame_height = j.at("frame_size").at(1).get<int>();
    for (const auto& [name, members] : j.at("splits").items()) {
      m.splits[name] = members.get<std::vector<std::string>>();
    }
    for (const auto& jf : j.at("frames")) {
      FrameRecord f;
      f.id = jf.at("id").get<std::string>();
      f.image_path = jf.at("image").get<std::string>();
      f.gaze.x = jf.at("gaze").at(0).get<double>();
      f.gaze.y = jf.at("gaze").at(1).get<double>();
      f.attended_class = jf.at("attended").get<int>();
      if (jf.contains("boxes")) {
        for (const auto& jb : jf.at("boxes")) {
          BoundingBox b{jb.at(1).get<int>(), jb.at(2).get<int>(),
                        jb.at(3).get<int>(), jb.at(4).get<int>()};
          f.gt_boxes.emplace_back(jb.at(0).get<int>(), b);
        }
      }
      m.frames.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest schema violation: ") + e.what());
  }
  return m;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open manifest: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("manifest is not valid JSON: " + std::string(e.what()));
  }
  DatasetManifest m = manifest_from_json(j);
  m.base_dir = path.has_parent_path() ? path.parent_path()
                                      : std::filesystem::path(".");
  m.validate();
  return m;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write manifest: " + path.string());
  }
  out << manifest_to_json(m).dump(2) << "\n";
}

GazeFilterResult filter_valid_gaze(const DatasetManifest& m) {
  GazeFilterResult res;
  res.manifest = m;
  res.manifest.frames.clear();
  std::unordered_set<std::string> kept;
  for (const auto& f : m.frames) {
    if (f.gaze.valid_in(m.frame_width, m.frame_height)) {
      res.manifest.frames.push_back(f);
      kept.insert(f.id);
    } else {
      ++res.removed;
    }
  }
  for (auto& [name, members] : res.manifest.splits) {
    std::vector<std::string> filtered;
    filtered.reserve(members.size());
    for (auto& id : members) {
      if (kept.count(id)) filtered.push_back(id);
    }
    members = std::move(filtered);
  }
  return res;
}

std::vector<GazeCsvRow> load_gaze_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open gaze log: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty gaze log: " + path.string());
  }
  if (line != "frame_id,x,y,label") {
    throw DataError("gaze log must start with header frame_id,x,y,label");
  }
  std::vector<GazeCsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    GazeCsvRow row;
    std::string field;
    try {
      if (!std::getline(ss, row.frame_id, ',')) throw std::invalid_argument("");
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("");
      row.x = std::stod(field);
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("");
      row.y = std::stod(field);
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("");
      row.label = std::stoi(field);
    } catch (const std::exception&) {
      throw DataError("malformed gaze log line " + std::to_string(lineno) +
                      " in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_gaze_csv(const std::vector<GazeCsvRow>& rows,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write gaze log: " + path.string());
  }
  out << "frame_id,x,y,label\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f", r.x, r.y);
    out << r.frame_id << ',' << buf << ',' << r.label << "\n";
  }
}

void apply_gaze_csv(DatasetManifest& m, const std::vector<GazeCsvRow>& rows) {
  std::unordered_map<std::string, FrameRecord*> by_id;
  for (auto& f : m.frames) by_id.emplace(f.id, &f);
  for (const auto& r : rows) {
    auto it = by_id.find(r.frame_id);
    if (it == by_id.end()) {
      throw DataError("gaze log references unknown frame: " + r.frame_id);
    }
    if (r.label < 0 || r.label >= m.num_classes()) {
      throw DataError("gaze log frame " + r.frame_id + ": unknown class index " +
                      std::to_string(r.label));
    }
    it->second->gaze.x = r.x;
    it->second->gaze.y = r.y;
    it->second->attended_class = r.label;
  }
}

}  // namespace gazeattend
