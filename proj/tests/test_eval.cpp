// Copyright 2026 The detsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <map>
#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/eval.hpp"
#include "oracle.hpp"

using detsplit::BoundingBox;
using detsplit::ConfigError;
using detsplit::Dataset;
using detsplit::Detection;
using detsplit::DetectorOutput;
using detsplit::InputError;
using detsplit::MatchResult;
using detsplit::RocMode;

namespace {

/// Build the library-side dataset and outputs plus the oracle-side problem
/// from one description, so both evaluators see identical inputs.
struct Fixture {
  Dataset dataset;
  std::map<std::string, DetectorOutput> outputs;
  oracle::Problem problem;

  void add_image(const std::string& id,
                 const std::vector<BoundingBox>& gt,
                 const std::vector<Detection>& detections) {
    detsplit::ImageRecord image;
    image.id = id;
    image.width = 100000;
    image.height = 100000;
    for (const auto& box : gt) image.faces.push_back({box, {}});
    dataset.images.push_back(std::move(image));
    std::sort(dataset.images.begin(), dataset.images.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    outputs[id] = DetectorOutput{id, detections, 0.0};
    problem[id] = oracle::Image{gt, detections};
  }

  MatchResult match(double threshold = 0.5) const {
    return detsplit::match_detections(outputs, dataset, threshold);
  }
};

}  // namespace

TEST_CASE("matching follows ranked greedy assignment") {
  Fixture fx;
  const BoundingBox gt{0, 0, 10, 10};
  fx.add_image("a", {gt},
               {{BoundingBox{0, 0, 8, 10}, 0.9},     // IoU 0.8 -> TP
                {BoundingBox{0, 0, 9, 10}, 0.7}});   // GT taken -> FP
  const MatchResult result = fx.match();
  CHECK(result.num_gt_faces == 1);
  REQUIRE(result.detections.size() == 2);
  CHECK(result.detections[0].is_tp);
  CHECK(result.detections[0].matched_iou == 0.8);
  CHECK_FALSE(result.detections[1].is_tp);
  CHECK(result.detections[1].matched_iou == 0.0);
}

TEST_CASE("an overlap of exactly one half is not a match") {
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}},
               {{BoundingBox{0, 0, 5, 10}, 0.9}});  // IoU exactly 0.5
  CHECK_FALSE(fx.match().detections[0].is_tp);
  // Strictly above the threshold does match.
  Fixture fy;
  fy.add_image("a", {BoundingBox{0, 0, 10, 10}},
               {{BoundingBox{0, 0, 6, 10}, 0.9}});  // IoU 0.6
  CHECK(fy.match().detections[0].is_tp);
}

TEST_CASE("equal overlap ties go to the earlier ground-truth box") {
  Fixture fx;
  // The detection straddles both boxes with IoU 1/3 each.
  fx.add_image("a",
               {BoundingBox{0, 0, 10, 10}, BoundingBox{10, 0, 20, 10}},
               {{BoundingBox{5, 0, 15, 10}, 0.9},
                {BoundingBox{5, 0, 15, 10}, 0.8}});
  const MatchResult result = fx.match(0.25);
  REQUIRE(result.detections.size() == 2);
  CHECK(result.detections[0].is_tp);  // claims the first box
  CHECK(result.detections[1].is_tp);  // second claims the remaining one
}

TEST_CASE("a failed claim does not consume the ground-truth box") {
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}},
               {{BoundingBox{0, 0, 3, 10}, 0.9},     // IoU 0.3: FP
                {BoundingBox{0, 0, 8, 10}, 0.7}});   // still free: TP
  const MatchResult result = fx.match();
  CHECK_FALSE(result.detections[0].is_tp);
  CHECK(result.detections[0].confidence == 0.9);
  CHECK(result.detections[1].is_tp);
}

TEST_CASE("global ranking breaks confidence ties by image id then box") {
  Fixture fx;
  fx.add_image("b", {BoundingBox{0, 0, 10, 10}},
               {{BoundingBox{0, 0, 10, 10}, 0.5}});
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}},
               {{BoundingBox{2, 0, 12, 10}, 0.5},
                {BoundingBox{0, 0, 10, 10}, 0.5}});
  const MatchResult result = fx.match();
  REQUIRE(result.detections.size() == 3);
  CHECK(result.detections[0].image_id == "a");
  CHECK(result.detections[0].box == BoundingBox{0, 0, 10, 10});
  CHECK(result.detections[1].image_id == "a");
  CHECK(result.detections[1].box == BoundingBox{2, 0, 12, 10});
  CHECK(result.detections[2].image_id == "b");
}

TEST_CASE("matching demands exact coverage in both directions") {
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}}, {});
  auto outputs = fx.outputs;
  outputs.erase("a");
  CHECK_THROWS_MATCHES(detsplit::match_detections(outputs, fx.dataset),
                       InputError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("'a'")));
  outputs["a"] = DetectorOutput{"a", {}, 0.0};
  outputs["ghost"] = DetectorOutput{"ghost", {}, 0.0};
  CHECK_THROWS_MATCHES(detsplit::match_detections(outputs, fx.dataset),
                       InputError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("ghost")));
  CHECK_THROWS_AS(detsplit::match_detections(fx.outputs, fx.dataset, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(detsplit::match_detections(fx.outputs, fx.dataset, 1.0),
                  ConfigError);
}

TEST_CASE("worked average precision example") {
  // Two ground-truth faces; ranked outcomes TP, FP, TP.
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}, BoundingBox{100, 0, 110, 10}},
               {{BoundingBox{0, 0, 8, 10}, 0.9},       // TP, IoU 0.8
                {BoundingBox{200, 0, 210, 10}, 0.7},   // FP
                {BoundingBox{100, 0, 108, 10}, 0.5}}); // TP, IoU 0.8
  const MatchResult result = fx.match();
  // Precision at the recall levels: 1 at 0.5, then 2/3 at 1.0.
  CHECK_THAT(detsplit::average_precision(result),
             Catch::Matchers::WithinAbs(0.5 + 0.5 * (2.0 / 3.0), 1e-15));

  const auto pr = detsplit::pr_curve(result);
  REQUIRE(pr.size() == 3);
  CHECK(pr[0].recall == 0.5);
  CHECK(pr[0].precision == 1.0);
  CHECK(pr[2].recall == 1.0);
}

TEST_CASE("worked roc example with discrete and continuous rates") {
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}, BoundingBox{100, 0, 110, 10}},
               {{BoundingBox{0, 0, 8, 10}, 0.9},       // TP, IoU 0.8
                {BoundingBox{200, 0, 210, 10}, 0.3}});  // FP
  const MatchResult result = fx.match();

  const auto disc = detsplit::roc_curve(result, RocMode::kDiscrete);
  REQUIRE(disc.size() == 3);
  CHECK(disc[0].false_positives == 0.0);
  CHECK(disc[0].rate == 0.0);
  CHECK(disc[1].false_positives == 0.0);
  CHECK(disc[1].rate == 0.5);
  CHECK(disc[2].false_positives == 1.0);
  CHECK(disc[2].rate == 0.5);

  CHECK(detsplit::roc_area(result, RocMode::kDiscrete) == 0.5);
  CHECK(detsplit::roc_area(result, RocMode::kContinuous) == 0.4);

  // Extending the axis keeps flat curves unchanged; clipping at zero width
  // is rejected.
  CHECK(detsplit::roc_area(result, RocMode::kDiscrete, 4.0) == 0.5);
  CHECK_THROWS_AS(detsplit::roc_area(result, RocMode::kDiscrete, -1.0),
                  ConfigError);
}

TEST_CASE("roc area integrates steps, extensions, and clips") {
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}, BoundingBox{100, 0, 110, 10}},
               {{BoundingBox{0, 0, 8, 10}, 0.9},        // TP
                {BoundingBox{200, 0, 210, 10}, 0.7},    // FP
                {BoundingBox{100, 0, 108, 10}, 0.5},    // TP
                {BoundingBox{300, 0, 310, 10}, 0.3}});  // FP
  const MatchResult result = fx.match();
  // Points: (0,0) (0,.5) (1,.5) (1,1) (2,1).
  CHECK(detsplit::roc_area(result, RocMode::kDiscrete) == 0.75);
  CHECK(detsplit::roc_area(result, RocMode::kDiscrete, 4.0) == 0.875);
  CHECK(detsplit::roc_area(result, RocMode::kDiscrete, 1.0) == 0.5);
}

TEST_CASE("perfect detector saturates the roc at any axis") {
  Fixture fx;
  fx.add_image("a", {BoundingBox{0, 0, 10, 10}},
               {{BoundingBox{0, 0, 10, 10}, 0.9}});
  const MatchResult result = fx.match();
  CHECK(detsplit::roc_area(result, RocMode::kDiscrete) == 1.0);
  CHECK(detsplit::roc_area(result, RocMode::kDiscrete, 5.0) == 1.0);
  CHECK(detsplit::average_precision(result) == 1.0);
  CHECK(detsplit::evaluate(result).cont_roc == 1.0);
}

TEST_CASE("metrics refuse a dataset with no ground truth") {
  Fixture fx;
  fx.add_image("a", {}, {{BoundingBox{0, 0, 10, 10}, 0.9}});
  const MatchResult result = fx.match();
  CHECK_THROWS_AS(detsplit::average_precision(result), InputError);
  CHECK_THROWS_AS(detsplit::roc_curve(result, RocMode::kDiscrete),
                  InputError);
}

TEST_CASE("library metrics equal the brute-force reference exactly") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> num_images(1, 3);
  std::uniform_int_distribution<int> num_gt(0, 3);
  std::uniform_int_distribution<int> num_det(0, 5);
  std::uniform_int_distribution<int> pick(0, 9);
  const double confs[4] = {0.2, 0.4, 0.6, 0.8};

  int evaluated = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Fixture fx;
    const int images = num_images(rng);
    std::size_t total_gt = 0;
    for (int i = 0; i < images; ++i) {
      const int gts = num_gt(rng);
      total_gt += gts;
      std::vector<BoundingBox> gt;
      for (int g = 0; g < gts; ++g) {
        gt.push_back(BoundingBox{g * 1000.0, 0.0, g * 1000.0 + 20.0, 20.0});
      }
      std::vector<Detection> dets;
      const int ds = num_det(rng);
      for (int d = 0; d < ds; ++d) {
        const double conf = confs[pick(rng) % 4];
        if (!gt.empty() && pick(rng) < 7) {
          // Perturbed copy of one ground-truth box.
          const auto& base = gt[pick(rng) % gt.size()];
          const double dx = (pick(rng) - 4) * 1.5;
          const double shrink = pick(rng);
          dets.push_back({BoundingBox{base.x_min + dx, base.y_min,
                                      base.x_max + dx - shrink, base.y_max},
                          conf});
        } else {
          dets.push_back({BoundingBox{50000.0 + d * 100.0, 0.0,
                                      50000.0 + d * 100.0 + 20.0, 20.0},
                          conf});
        }
      }
      fx.add_image("img" + std::to_string(i), gt, dets);
    }
    if (total_gt == 0) continue;
    ++evaluated;

    const MatchResult lib = fx.match();
    const auto ref = oracle::match(fx.problem, 0.5);
    REQUIRE(lib.detections.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(lib.detections[i].confidence == ref[i].confidence);
      CHECK(lib.detections[i].is_tp == ref[i].tp);
      CHECK(lib.detections[i].matched_iou == ref[i].iou);
    }

    CHECK(detsplit::average_precision(lib) ==
          oracle::average_precision(ref, total_gt));
    for (const double axis : {0.0, 1.0, 2.0, 3.5, 7.0}) {
      CHECK(detsplit::roc_area(lib, RocMode::kDiscrete, axis) ==
            oracle::roc_area(ref, total_gt, false, axis));
      CHECK(detsplit::roc_area(lib, RocMode::kContinuous, axis) ==
            oracle::roc_area(ref, total_gt, true, axis));
    }
    // The continuous rate can never exceed the discrete one.
    const auto report = detsplit::evaluate(lib);
    CHECK(report.cont_roc <= report.disc_roc);
  }
  CHECK(evaluated > 300);  // the generator rarely produces zero-GT trials
}
