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
#include <doctest.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gazeattend/boxfit.hpp"
#include "gazeattend/errors.hpp"
#include "gazeattend/gridmap.hpp"
#include "gazeattend/rng.hpp"
#include "oracles.hpp"

namespace gazeattend {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() /
                 ("gazeattend_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Random label field: a background wash of `other`, a few solid class
// rectangles, then salt noise. Mirrors what upsampled coarse maps look like.
// When `rects_out` is given it receives the drawn rectangles so a caller can
// aim the gaze at one, the way real gaze lands on objects.
SegmentationMask RandomMask(Rng& rng, int num_classes, int other,
                            std::vector<BoundingBox>* rects_out = nullptr) {
  const int w = rng.uniform_int(8, 256);
  const int h = rng.uniform_int(8, 256);
  SegmentationMask mask(w, h);
  for (auto& v : mask.labels) v = static_cast<std::uint8_t>(other);
  const int rects = rng.uniform_int(1, 5);
  for (int i = 0; i < rects; ++i) {
    const int rw = rng.uniform_int(1, std::max(1, w / 2));
    const int rh = rng.uniform_int(1, std::max(1, h / 2));
    const int x0 = rng.uniform_int(0, w - rw);
    const int y0 = rng.uniform_int(0, h - rh);
    const int cls = rng.uniform_int(0, num_classes - 1);
    if (rects_out) rects_out->push_back({x0, y0, rw, rh});
    for (int y = y0; y < y0 + rh; ++y) {
      for (int x = x0; x < x0 + rw; ++x) {
        mask.at(x, y) = static_cast<std::uint8_t>(cls);
      }
    }
  }
  const int salt = rng.uniform_int(0, w * h / 16);
  for (int i = 0; i < salt; ++i) {
    mask.at(rng.uniform_int(0, w - 1), rng.uniform_int(0, h - 1)) =
        static_cast<std::uint8_t>(rng.uniform_int(0, num_classes - 1));
  }
  return mask;
}

std::vector<std::uint32_t> Sorted(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST_SUITE("boxfit") {

TEST_CASE("attended class is the neighborhood mode") {
  SegmentationMask mask(10, 10);
  // Left half class 1, right half class 0; a 6-wide window at the center
  // sees 3 columns of each, so the tie goes to class 0.
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 5; ++x) mask.at(x, y) = 1;
  }
  auto got = select_attended_class(mask, {5.0, 5.0}, /*other=*/9,
                                   /*neighborhood=*/6);
  REQUIRE(got.has_value());
  CHECK(*got == 0);

  // Shift left: class 1 dominates.
  got = select_attended_class(mask, {3.0, 5.0}, 9, 6);
  REQUIRE(got.has_value());
  CHECK(*got == 1);

  // A window dominated by the background class selects nothing.
  SegmentationMask bg(10, 10);
  for (auto& v : bg.labels) v = 2;
  CHECK_FALSE(select_attended_class(bg, {5.0, 5.0}, /*other=*/2, 6).has_value());
}

TEST_CASE("attended class selection validates inputs") {
  SegmentationMask mask(10, 10);
  CHECK_THROWS_AS(select_attended_class(mask, {5.0, 5.0}, 0, 0), ConfigError);
  CHECK_THROWS_AS(select_attended_class(mask, {15.0, 5.0}, 0, 4), DataError);
  CHECK_THROWS_AS(select_attended_class(SegmentationMask{}, {0.0, 0.0}, 0, 4),
                  DataError);
}

TEST_CASE("mode and median agree with the sorting oracle") {
  Rng rng(71);
  int mode_checked = 0, median_checked = 0;
  for (int i = 0; i < 300; ++i) {
    const int num_classes = rng.uniform_int(2, 5);
    const int other = rng.uniform_int(0, num_classes - 1);
    std::vector<BoundingBox> rects;
    SegmentationMask mask = RandomMask(rng, num_classes, other, &rects);
    // Mostly aim at a rectangle, as gaze lands on objects; sometimes roam.
    GazeSample gaze{rng.uniform_real(0.0, mask.width - 0.001),
                    rng.uniform_real(0.0, mask.height - 0.001)};
    if (!rects.empty() && rng.bernoulli(0.7)) {
      const BoundingBox& r =
          rects[rng.uniform_int(0, static_cast<int>(rects.size()) - 1)];
      gaze = {r.x + rng.uniform_real(0.0, r.w), r.y + rng.uniform_real(0.0, r.h)};
    }
    // Half the windows stay small enough to sit inside one rectangle; the
    // rest stress the clamping of production-sized neighborhoods.
    const int side =
        rng.bernoulli(0.5) ? rng.uniform_int(1, 24) : rng.uniform_int(25, 120);
    const std::vector<int> window =
        testing::OracleNeighborhood(mask, gaze.x, gaze.y, side);

    auto got = select_attended_class(mask, gaze, other, side);
    const int mode = testing::OracleMode(window);
    if (mode == other) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == mode);
      ++mode_checked;
    }

    auto got_med = select_attended_class(mask, gaze, other, side,
                                         NeighborhoodStat::kMedian);
    const int median = testing::OracleMedian(window);
    if (median == other) {
      CHECK_FALSE(got_med.has_value());
    } else {
      REQUIRE(got_med.has_value());
      CHECK(*got_med == median);
      ++median_checked;
    }
  }
  CHECK(mode_checked > 50);
  CHECK(median_checked > 50);
}

TEST_CASE("component extraction follows 4-connectivity") {
  SegmentationMask mask(8, 5);
  //  ...11...
  //  ...1....
  //  ........
  //  .1......   <- separate component, diagonal contact does not join
  //  ........
  mask.at(3, 0) = 1;
  mask.at(4, 0) = 1;
  mask.at(3, 1) = 1;
  mask.at(1, 3) = 1;

  PixelSet comp = extract_component(mask, 1, {3.0, 0.0});
  CHECK(Sorted(comp) == std::vector<std::uint32_t>{3, 4, 8 + 3});
  BoundingBox box = fit_box(comp, 8);
  CHECK(box == BoundingBox{3, 0, 2, 2});

  // Gaze on another class: nearest component of class 1 wins.
  PixelSet near = extract_component(mask, 1, {1.0, 4.0});
  CHECK(Sorted(near) == std::vector<std::uint32_t>{3 * 8 + 1});

  CHECK_THROWS_AS(extract_component(mask, 7, {3.0, 0.0}), DataError);
  CHECK_THROWS_AS(fit_box({}, 8), DataError);
}

TEST_CASE("component extraction matches the relaxation oracle") {
  Rng rng(72);
  for (int i = 0; i < 150; ++i) {
    const int num_classes = rng.uniform_int(2, 4);
    SegmentationMask mask = RandomMask(rng, num_classes, num_classes - 1);
    const GazeSample gaze{rng.uniform_real(0.0, mask.width - 0.001),
                          rng.uniform_real(0.0, mask.height - 0.001)};
    const int cls = rng.uniform_int(0, num_classes - 1);
    auto want = testing::OracleGazeComponent(mask, cls, gaze.x, gaze.y);
    if (want.empty()) {
      CHECK_THROWS_AS(extract_component(mask, cls, gaze), DataError);
      continue;
    }
    PixelSet got = extract_component(mask, cls, gaze);
    CHECK(Sorted(got) == Sorted(want));
    CHECK(fit_box(got, mask.width) == testing::OracleBox(want, mask.width));
  }
}

TEST_CASE("full detection covers the attended component") {
  ClassProbMap map(GridGeometry::make(224, 160, 32, 96), 3);
  for (int r = 0; r < map.geom.rows; ++r) {
    for (int c = 0; c < map.geom.cols; ++c) {
      float* p = map.cell(r, c);
      if (r >= 1 && r <= 2 && c >= 2 && c <= 4) {
        p[1] = 0.9f;
        p[0] = 0.05f;
        p[2] = 0.05f;
      } else {
        p[2] = 1.0f;  // background elsewhere
      }
    }
  }
  auto det = detect_attended(map, {100.0, 60.0}, /*other=*/2);
  REQUIRE(det.has_value());
  CHECK(det->class_id == 1);
  CHECK(det->box == BoundingBox{64, 32, 96, 64});
  CHECK(det->score == doctest::Approx(0.9));

  // Gaze deep in background: no detection.
  CHECK_FALSE(detect_attended(map, {10.0, 150.0}, 2).has_value());
}

TEST_CASE("gaze box selection picks the smallest covering box") {
  std::vector<Detection> dets = {
      {0, {0, 0, 100, 100}, 0.9},
      {1, {20, 20, 30, 30}, 0.4},
      {2, {25, 25, 30, 30}, 0.8},
  };
  auto got = select_gaze_box(dets, {30.0, 30.0});
  REQUIRE(got.has_value());
  // Two 30x30 candidates contain the gaze; the higher score wins the tie.
  CHECK(got->class_id == 2);

  got = select_gaze_box(dets, {5.0, 5.0});
  REQUIRE(got.has_value());
  CHECK(got->class_id == 0);

  CHECK_FALSE(select_gaze_box(dets, {200.0, 200.0}).has_value());

  Rng rng(73);
  for (int i = 0; i < 300; ++i) {
    std::vector<Detection> ds;
    const int n = rng.uniform_int(0, 6);
    for (int j = 0; j < n; ++j) {
      Detection d;
      d.class_id = rng.uniform_int(0, 3);
      d.box = {rng.uniform_int(0, 40), rng.uniform_int(0, 40),
               rng.uniform_int(1, 40), rng.uniform_int(1, 40)};
      d.score = rng.uniform_real(0.0, 1.0);
      ds.push_back(d);
    }
    const double gx = rng.uniform_real(0.0, 60.0);
    const double gy = rng.uniform_real(0.0, 60.0);
    auto a = select_gaze_box(ds, {gx, gy});
    auto b = testing::OracleGazeBox(ds, gx, gy);
    CHECK(a.has_value() == b.has_value());
    if (a && b) {
      CHECK(a->class_id == b->class_id);
      CHECK(a->box == b->box);
      CHECK(a->score == b->score);
    }
  }
}

TEST_CASE("detections round-trip through JSON lines") {
  fs::path dir = TempDir("jsonl");
  std::vector<FrameDetections> dets(2);
  dets[0].frame_id = "f1";
  dets[0].detections.push_back({2, {10, 20, 30, 40}, 0.75});
  dets[1].frame_id = "f2";  // prediction-free frames stay listed
  save_detections_jsonl(dets, dir / "d.jsonl");

  auto back = load_detections_jsonl(dir / "d.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0].frame_id == "f1");
  REQUIRE(back[0].detections.size() == 1);
  CHECK(back[0].detections[0].class_id == 2);
  CHECK(back[0].detections[0].box == BoundingBox{10, 20, 30, 40});
  CHECK(back[0].detections[0].score == doctest::Approx(0.75));
  CHECK(back[1].detections.empty());

  std::ofstream bad(dir / "bad.jsonl");
  bad << R"({"frame_id":"f1","detections":[]})" << "\n";
  bad << "{broken\n";
  bad.close();
  CHECK_THROWS_AS(load_detections_jsonl(dir / "bad.jsonl"), DataError);
  fs::remove_all(dir);
}

}  // TEST_SUITE

}  // namespace
}  // namespace gazeattend
