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
#include "gazeattend/boxfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include <json.hpp>

#include "gazeattend/errors.hpp"

namespace gazeattend {

std::optional<int> select_attended_class(const SegmentationMask& mask,
                                         const GazeSample& gaze,
                                         int other_index, int neighborhood,
                                         NeighborhoodStat stat) {
  if (mask.width < 1 || mask.height < 1) throw DataError("empty mask");
  if (neighborhood < 1) throw ConfigError("neighborhood must be >= 1");
  if (!gaze.valid_in(mask.width, mask.height)) {
    throw DataError("gaze outside the frame");
  }
  const int side_x = std::min(neighborhood, mask.width);
  const int side_y = std::min(neighborhood, mask.height);
  const int x0 = std::clamp(gaze.pixel_x(mask.width) - neighborhood / 2, 0,
                            mask.width - side_x);
  const int y0 = std::clamp(gaze.pixel_y(mask.height) - neighborhood / 2, 0,
                            mask.height - side_y);

  std::array<std::int64_t, 256> counts{};
  for (int y = y0; y < y0 + side_y; ++y) {
    for (int x = x0; x < x0 + side_x; ++x) {
      ++counts[mask.at(x, y)];
    }
  }

  int winner = 0;
  if (stat == NeighborhoodStat::kMode) {
    std::int64_t best = -1;
    for (int c = 0; c < 256; ++c) {
      if (counts[c] > best) {  // strict: ties keep the smaller index
        best = counts[c];
        winner = c;
      }
    }
  } else {
    // Literal integer median of the window's class indices (lower median).
    const std::int64_t total = static_cast<std::int64_t>(side_x) * side_y;
    std::int64_t want = (total - 1) / 2;
    for (int c = 0; c < 256; ++c) {
      want -= counts[c];
      if (want < 0) {
        winner = c;
        break;
      }
    }
  }
  if (winner == other_index) return std::nullopt;
  return winner;
}

PixelSet extract_component(const SegmentationMask& mask, int class_id,
                           const GazeSample& gaze) {
  if (!gaze.valid_in(mask.width, mask.height)) {
    throw DataError("gaze outside the frame");
  }
  const int W = mask.width;
  const int H = mask.height;
  const int gx = gaze.pixel_x(W);
  const int gy = gaze.pixel_y(H);

  std::vector<std::uint8_t> visited(static_cast<std::size_t>(W) * H, 0);
  auto flood = [&](int sx, int sy) {
    PixelSet comp;
    std::queue<std::pair<int, int>> q;
    q.emplace(sx, sy);
    visited[static_cast<std::size_t>(sy) * W + sx] = 1;
    while (!q.empty()) {
      auto [x, y] = q.front();
      q.pop();
      comp.push_back(static_cast<std::uint32_t>(y) * W + x);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int i = 0; i < 4; ++i) {
        if (nx[i] < 0 || nx[i] >= W || ny[i] < 0 || ny[i] >= H) continue;
        std::uint8_t& seen = visited[static_cast<std::size_t>(ny[i]) * W + nx[i]];
        if (seen || mask.at(nx[i], ny[i]) != class_id) continue;
        seen = 1;
        q.emplace(nx[i], ny[i]);
      }
    }
    return comp;
  };

  if (mask.at(gx, gy) == class_id) return flood(gx, gy);

  // The gaze pixel carries another class: take the nearest component.
  PixelSet best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::int64_t best_row = 0, best_col = 0;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (visited[static_cast<std::size_t>(y) * W + x]) continue;
      if (mask.at(x, y) != class_id) continue;
      PixelSet comp = flood(x, y);
      double dist = std::numeric_limits<double>::infinity();
      std::int64_t min_row = H, min_col = W;
      for (std::uint32_t p : comp) {
        const int px = static_cast<int>(p % W);
        const int py = static_cast<int>(p / W);
        const double dx = px - gx, dy = py - gy;
        dist = std::min(dist, dx * dx + dy * dy);
        min_row = std::min<std::int64_t>(min_row, py);
        min_col = std::min<std::int64_t>(min_col, px);
      }
      const bool closer =
          dist < best_dist ||
          (dist == best_dist &&
           (min_row < best_row || (min_row == best_row && min_col < best_col)));
      if (closer) {
        best = std::move(comp);
        best_dist = dist;
        best_row = min_row;
        best_col = min_col;
      }
    }
  }
  if (best.empty()) {
    throw DataError("class " + std::to_string(class_id) +
                    " is absent from the mask");
  }
  return best;
}

BoundingBox fit_box(const PixelSet& component, int mask_width) {
  if (component.empty()) throw DataError("empty component");
  int min_x = std::numeric_limits<int>::max(), max_x = -1;
  int min_y = std::numeric_limits<int>::max(), max_y = -1;
  for (std::uint32_t p : component) {
    const int x = static_cast<int>(p % mask_width);
    const int y = static_cast<int>(p / mask_width);
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

std::optional<Detection> detect_attended(const ClassProbMap& map,
                                         const GazeSample& gaze,
                                         int other_index, int neighborhood,
                                         NeighborhoodStat stat) {
  SegmentationMask mask = upsample_to_mask(map);
  std::optional<int> cls =
      select_attended_class(mask, gaze, other_index, neighborhood, stat);
  if (!cls) return std::nullopt;
  PixelSet comp = extract_component(mask, *cls, gaze);
  Detection det;
  det.class_id = *cls;
  det.box = fit_box(comp, mask.width);

  // Mean nearest-neighbor-upsampled probability of the chosen class.
  const GridGeometry& g = map.geom;
  double score = 0.0;
  for (std::uint32_t p : comp) {
    const int x = static_cast<int>(p % mask.width);
    const int y = static_cast<int>(p / mask.width);
    const int r = std::min(g.rows - 1, g.row_of(y));
    const int c = std::min(g.cols - 1, g.col_of(x));
    score += map.cell(r, c)[*cls];
  }
  det.score = score / static_cast<double>(comp.size());
  return det;
}

std::optional<Detection> select_gaze_box(const std::vector<Detection>& dets,
                                         const GazeSample& gaze) {
  const Detection* best = nullptr;
  for (const auto& d : dets) {
    if (!d.box.contains(gaze.x, gaze.y)) continue;
    if (best == nullptr || d.box.area() < best->box.area() ||
        (d.box.area() == best->box.area() && d.score > best->score)) {
      best = &d;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

void save_detections_jsonl(const std::vector<FrameDetections>& dets,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write detections: " + path.string());
  for (const auto& frame : dets) {
    nlohmann::ordered_json j;
    j["frame_id"] = frame.frame_id;
    j["detections"] = nlohmann::json::array();
    for (const auto& d : frame.detections) {
      j["detections"].push_back({{"class", d.class_id},
                                 {"box", {d.box.x, d.box.y, d.box.w, d.box.h}},
                                 {"score", d.score}});
    }
    out << j.dump() << "\n";
  }
  if (!out) throw DataError("short write to detections: " + path.string());
}

std::vector<FrameDetections> load_detections_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read detections: " + path.string());
  std::vector<FrameDetections> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      FrameDetections frame;
      frame.frame_id = j.at("frame_id").get<std::string>();
      for (const auto& dj : j.at("detections")) {
        Detection d;
        d.class_id = dj.at("class").get<int>();
        d.box = {dj.at("box").at(0).get<int>(), dj.at("box").at(1).get<int>(),
                 dj.at("box").at(2).get<int>(), dj.at("box").at(3).get<int>()};
        d.score = dj.at("score").get<double>();
        frame.detections.push_back(d);
      }
      out.push_back(std::move(frame));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

}  // namespace gazeattend
