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
#include "gazeattend/gridmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gazeattend/errors.hpp"
#include "gazeattend/image.hpp"

namespace gazeattend {

GridGeometry GridGeometry::make(int frame_w, int frame_h, int stride,
                                int window) {
  if (frame_w < 1 || frame_h < 1) throw ConfigError("frame size must be positive");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  GridGeometry g;
  g.frame_w = frame_w;
  g.frame_h = frame_h;
  g.stride = stride;
  g.window = window;
  g.rows = (frame_h + stride - 1) / stride;
  g.cols = (frame_w + stride - 1) / stride;
  return g;
}

std::pair<int, int> GridGeometry::cell_window_origin(int r, int c) const {
  const double cx = (c + 0.5) * stride;
  const double cy = (r + 0.5) * stride;
  int x0 = static_cast<int>(std::lround(cx)) - window / 2;
  int y0 = static_cast<int>(std::lround(cy)) - window / 2;
  x0 = std::clamp(x0, 0, std::max(0, frame_w - window));
  y0 = std::clamp(y0, 0, std::max(0, frame_h - window));
  return {x0, y0};
}

int ClassProbMap::cell_argmax(int r, int c) const {
  const float* p = cell(r, c);
  return static_cast<int>(std::max_element(p, p + num_classes) - p);
}

SegmentationMask upsample_to_mask(const ClassProbMap& map) {
  const GridGeometry& g = map.geom;
  SegmentationMask mask(g.frame_w, g.frame_h);
  for (int r = 0; r < g.rows; ++r) {
    const int y0 = r * g.stride;
    const int y1 = std::min(g.frame_h, y0 + g.stride);
    for (int c = 0; c < g.cols; ++c) {
      const std::uint8_t label = static_cast<std::uint8_t>(map.cell_argmax(r, c));
      const int x0 = c * g.stride;
      const int x1 = std::min(g.frame_w, x0 + g.stride);
      for (int y = y0; y < y1; ++y) {
        std::fill(&mask.at(x0, y), &mask.at(x0, y) + (x1 - x0), label);
      }
    }
  }
  return mask;
}

std::vector<float> upsample_probs(const ClassProbMap& map, bool bilinear) {
  const GridGeometry& g = map.geom;
  const int C = map.num_classes;
  std::vector<float> out(static_cast<std::size_t>(g.frame_w) * g.frame_h * C);
  if (!bilinear) {
    for (int y = 0; y < g.frame_h; ++y) {
      const int r = std::min(g.rows - 1, g.row_of(y));
      for (int x = 0; x < g.frame_w; ++x) {
        const int c = std::min(g.cols - 1, g.col_of(x));
        const float* src = map.cell(r, c);
        float* dst = out.data() + (static_cast<std::size_t>(y) * g.frame_w + x) * C;
        std::copy(src, src + C, dst);
      }
    }
    return out;
  }
  // Bilinear over cell centers, clamped at the border cells.
  for (int y = 0; y < g.frame_h; ++y) {
    const double fy = (y + 0.5) / g.stride - 0.5;
    const int r0 = std::clamp(static_cast<int>(std::floor(fy)), 0, g.rows - 1);
    const int r1 = std::min(r0 + 1, g.rows - 1);
    const float wy = static_cast<float>(std::clamp(fy - r0, 0.0, 1.0));
    for (int x = 0; x < g.frame_w; ++x) {
      const double fx = (x + 0.5) / g.stride - 0.5;
      const int c0 = std::clamp(static_cast<int>(std::floor(fx)), 0, g.cols - 1);
      const int c1 = std::min(c0 + 1, g.cols - 1);
      const float wx = static_cast<float>(std::clamp(fx - c0, 0.0, 1.0));
      const float* p00 = map.cell(r0, c0);
      const float* p01 = map.cell(r0, c1);
      const float* p10 = map.cell(r1, c0);
      const float* p11 = map.cell(r1, c1);
      float* dst = out.data() + (static_cast<std::size_t>(y) * g.frame_w + x) * C;
      for (int k = 0; k < C; ++k) {
        const float top = p00[k] + wx * (p01[k] - p00[k]);
        const float bot = p10[k] + wx * (p11[k] - p10[k]);
        dst[k] = top + wy * (bot - top);
      }
    }
  }
  return out;
}

namespace {
constexpr char kMapMagic[4] = {'C', 'P', 'M', '1'};
}

void save_prob_map(const ClassProbMap& map, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["rows"] = map.geom.rows;
  j["cols"] = map.geom.cols;
  j["num_classes"] = map.num_classes;
  j["stride"] = map.geom.stride;
  j["window"] = map.geom.window;
  j["frame_size"] = {map.geom.frame_w, map.geom.frame_h};
  const std::string header = j.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write prob map: " + path.string());
  out.write(kMapMagic, 4);
  const std::uint32_t len = static_cast<std::uint32_t>(header.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(map.probs.data()),
            static_cast<std::streamsize>(map.probs.size() * sizeof(float)));
  if (!out) throw DataError("short write to prob map: " + path.string());
}

ClassProbMap load_prob_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read prob map: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMapMagic, 4) != 0) {
    throw DataError("not a prob map file: " + path.string());
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string header(len, '\0');
  in.read(header.data(), len);
  if (!in) throw DataError("truncated prob map header: " + path.string());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad prob map header: " + std::string(e.what()));
  }
  GridGeometry g;
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
  g.stride = j.at("stride").get<int>();
  g.window = j.at("window").get<int>();
  g.frame_w = j.at("frame_size").at(0).get<int>();
  g.frame_h = j.at("frame_size").at(1).get<int>();
  GridGeometry expect = GridGeometry::make(g.frame_w, g.frame_h, g.stride, g.window);
  if (!(g == expect)) {
    throw DataError("prob map header is inconsistent: " + path.string());
  }

  ClassProbMap map(g, j.at("num_classes").get<int>());
  in.read(reinterpret_cast<char*>(map.probs.data()),
          static_cast<std::streamsize>(map.probs.size() * sizeof(float)));
  if (!in || in.gcount() !=
                 static_cast<std::streamsize>(map.probs.size() * sizeof(float))) {
    throw DataError("truncated prob map payload: " + path.string());
  }
  return map;
}

void save_mask(const SegmentationMask& mask, const std::filesystem::path& path) {
  save_gray_png(mask.labels, mask.width, mask.height, path);
}

SegmentationMask load_mask(const std::filesystem::path& path) {
  SegmentationMask mask;
  mask.labels = load_gray_png(path, &mask.width, &mask.height);
  return mask;
}

}  // namespace gazeattend
