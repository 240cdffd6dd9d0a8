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
// Brute-force reference implementations used to cross-check the library.
// Everything here is written from the documented contracts with deliberately
// naive algorithms (sorting instead of counting, label relaxation instead of
// flood fill, prefix re-scans instead of running sums) so a shared bug with
// the production code is unlikely.
#ifndef GAZEATTEND_TESTS_ORACLES_HPP_
#define GAZEATTEND_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gazeattend/gridmap.hpp"
#include "gazeattend/metrics.hpp"
#include "gazeattend/types.hpp"

namespace gazeattend::testing {

// Top-left of the side x side window centered on the gaze, shifted to stay
// inside the frame.
inline std::pair<int, int> OracleWindowOrigin(double gx, double gy, int side,
                                              int frame_w, int frame_h) {
  auto clamp1d = [&](double g, int extent) {
    int lo = static_cast<int>(std::lround(g)) - side / 2;
    if (lo < 0) lo = 0;
    if (lo > extent - side) lo = extent - side;
    return lo;
  };
  return {clamp1d(gx, frame_w), clamp1d(gy, frame_h)};
}

// Number of stride-spaced window positions needed to cover an extent: one
// cell per offset r*stride that still starts inside the frame.
inline int OracleCellCount(int extent, int stride) {
  int n = 0;
  for (long long p = 0; p < extent; p += stride) ++n;
  return n;
}

// Class values of the clamped neighborhood window, gathered pixel by pixel.
inline std::vector<int> OracleNeighborhood(const SegmentationMask& mask,
                                           double gx, double gy, int side) {
  const int px = std::min(static_cast<int>(std::floor(gx)), mask.width - 1);
  const int py = std::min(static_cast<int>(std::floor(gy)), mask.height - 1);
  const int sx = std::min(side, mask.width);
  const int sy = std::min(side, mask.height);
  const int x0 = std::clamp(px - side / 2, 0, mask.width - sx);
  const int y0 = std::clamp(py - side / 2, 0, mask.height - sy);
  std::vector<int> values;
  for (int y = y0; y < y0 + sy; ++y) {
    for (int x = x0; x < x0 + sx; ++x) {
      values.push_back(mask.at(x, y));
    }
  }
  return values;
}

// Most frequent value; ties go to the smaller value. Uses an explicit
// sort + run-length scan.
inline int OracleMode(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  int best_value = values[0];
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    if (j - i > best_run) {  // strict: earlier (smaller) value wins ties
      best_run = j - i;
      best_value = values[i];
    }
    i = j;
  }
  return best_value;
}

// Lower median of the integer values.
inline int OracleMedian(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

// All 4-connected components of `class_id`, via iterative label relaxation:
// every class pixel starts as its own label and sweeps propagate the minimum
// label between neighbors until nothing changes.
inline std::vector<std::vector<std::uint32_t>> OracleComponents(
    const SegmentationMask& mask, int class_id) {
  const int W = mask.width, H = mask.height;
  std::vector<std::int64_t> label(static_cast<std::size_t>(W) * H, -1);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (mask.at(x, y) == class_id) label[y * W + x] = y * W + x;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    auto relax = [&](int x, int y) {
      std::int64_t& l = label[y * W + x];
      if (l < 0) return;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int i = 0; i < 4; ++i) {
        if (nx[i] < 0 || nx[i] >= W || ny[i] < 0 || ny[i] >= H) continue;
        std::int64_t n = label[ny[i] * W + nx[i]];
        if (n >= 0 && n < l) {
          l = n;
          changed = true;
        }
      }
    };
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) relax(x, y);
    for (int y = H - 1; y >= 0; --y)
      for (int x = W - 1; x >= 0; --x) relax(x, y);
  }
  std::map<std::int64_t, std::vector<std::uint32_t>> by_label;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (label[y * W + x] >= 0) {
        by_label[label[y * W + x]].push_back(
            static_cast<std::uint32_t>(y) * W + x);
      }
    }
  }
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& [l, pixels] : by_label) out.push_back(std::move(pixels));
  return out;
}

// Component under the gaze pixel, or the nearest one of that class: minimum
// squared distance, ties by smaller top row, then smaller leftmost column.
inline std::vector<std::uint32_t> OracleGazeComponent(
    const SegmentationMask& mask, int class_id, double gx, double gy) {
  const int W = mask.width;
  const int px = std::min(static_cast<int>(std::floor(gx)), mask.width - 1);
  const int py = std::min(static_cast<int>(std::floor(gy)), mask.height - 1);
  auto components = OracleComponents(mask, class_id);
  std::vector<std::uint32_t> best;
  double best_key[3] = {std::numeric_limits<double>::infinity(), 0, 0};
  for (auto& comp : components) {
    double d2 = std::numeric_limits<double>::infinity();
    double top = mask.height, left = mask.width;
    bool contains = false;
    for (std::uint32_t p : comp) {
      const int x = static_cast<int>(p % W), y = static_cast<int>(p / W);
      if (x == px && y == py) contains = true;
      const double dx = x - px, dy = y - py;
      d2 = std::min(d2, dx * dx + dy * dy);
      top = std::min(top, static_cast<double>(y));
      left = std::min(left, static_cast<double>(x));
    }
    if (contains) return comp;
    const double key[3] = {d2, top, left};
    if (std::lexicographical_compare(key, key + 3, best_key, best_key + 3)) {
      best = comp;
      best_key[0] = key[0];
      best_key[1] = key[1];
      best_key[2] = key[2];
    }
  }
  return best;
}

// Tight bounds of a pixel set.
inline BoundingBox OracleBox(const std::vector<std::uint32_t>& pixels,
                             int width) {
  int min_x = std::numeric_limits<int>::max(), max_x = -1;
  int min_y = std::numeric_limits<int>::max(), max_y = -1;
  for (std::uint32_t p : pixels) {
    const int x = static_cast<int>(p % width), y = static_cast<int>(p / width);
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

// Smallest-area detection whose box contains the gaze; ties by higher score.
inline std::optional<Detection> OracleGazeBox(const std::vector<Detection>& ds,
                                              double gx, double gy) {
  std::optional<Detection> best;
  for (const Detection& d : ds) {
    if (!d.box.contains(gx, gy)) continue;
    if (!best || d.box.area() < best->box.area() ||
        (d.box.area() == best->box.area() && d.score > best->score)) {
      best = d;
    }
  }
  return best;
}

inline double OracleIou(const BoundingBox& a, const BoundingBox& b) {
  const double x1 = std::max(a.x, b.x);
  const double y1 = std::max(a.y, b.y);
  const double x2 = std::min(a.x + a.w, b.x + b.w);
  const double y2 = std::min(a.y + a.h, b.y + b.h);
  const double inter = std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
  const double uni = static_cast<double>(a.w) * a.h +
                     static_cast<double>(b.w) * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

// Average precision by explicit precision-recall enumeration: sort the class
// detections by score, re-scan every prefix to count its true positives, and
// take the 101-point interpolated area. Scores must be distinct for the
// ordering to be unambiguous.
inline std::optional<double> OracleAveragePrecision(
    const std::vector<FrameDetections>& dets, const AttendedGts& gts,
    int class_id, double iou_threshold) {
  int num_positive = 0;
  for (const auto& [id, gt] : gts) {
    if (gt.class_id == class_id) ++num_positive;
  }
  if (num_positive == 0) return std::nullopt;

  struct Entry {
    double score;
    std::string frame_id;
    BoundingBox box;
  };
  std::vector<Entry> entries;
  for (const auto& f : dets) {
    for (const auto& d : f.detections) {
      if (d.class_id == class_id) entries.push_back({d.score, f.frame_id, d.box});
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.score > b.score; });

  // One ground truth per frame: within a prefix the highest-scoring matching
  // detection of a frame is the true positive, the rest are false positives.
  auto matches = [&](const Entry& e) {
    auto it = gts.find(e.frame_id);
    return it != gts.end() && it->second.class_id == class_id &&
           OracleIou(e.box, it->second.box) >= iou_threshold;
  };
  std::vector<double> precision, recall;
  for (std::size_t k = 1; k <= entries.size(); ++k) {
    int tp = 0;
    std::vector<std::string> used;
    for (std::size_t i = 0; i < k; ++i) {
      if (!matches(entries[i])) continue;
      if (std::find(used.begin(), used.end(), entries[i].frame_id) !=
          used.end()) {
        continue;
      }
      used.push_back(entries[i].frame_id);
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k));
    recall.push_back(static_cast<double>(tp) / num_positive);
  }

  double area = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    double best = 0.0;
    for (std::size_t j = 0; j < precision.size(); ++j) {
      if (recall[j] >= r) best = std::max(best, precision[j]);
    }
    area += best;
  }
  return area / 101.0;
}

// Direct-sum KL divergence in extended precision.
inline double OracleKl(const std::vector<float>& p, const std::vector<float>& q) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0f) continue;
    long double qi = q[i] < 1e-8f ? 1e-8L : static_cast<long double>(q[i]);
    acc += static_cast<long double>(p[i]) *
           std::log(static_cast<long double>(p[i]) / qi);
  }
  return static_cast<double>(acc);
}

}  // namespace gazeattend::testing

#endif  // GAZEATTEND_TESTS_ORACLES_HPP_
