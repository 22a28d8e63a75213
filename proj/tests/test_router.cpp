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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/difficulty.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/router.hpp"

using detsplit::BackendConfig;
using detsplit::BoundingBox;
using detsplit::ConfigError;
using detsplit::CriterionSpec;
using detsplit::Dataset;
using detsplit::Detection;
using detsplit::InputError;
using detsplit::kInfinity;
using detsplit::PrecomputedBackend;
using detsplit::ScoreTableRegistry;
using detsplit::SplitSpec;
using detsplit::TimingModel;

namespace {

Dataset four_image_dataset() {
  Dataset dataset;
  dataset.name = "routing";
  for (const std::string id : {"a", "b", "c", "d"}) {
    detsplit::ImageRecord image;
    image.id = id;
    image.width = 100;
    image.height = 100;
    image.faces.push_back({BoundingBox{10, 10, 30, 30}, {}});
    dataset.images.push_back(std::move(image));
  }
  return dataset;
}

/// Fast backend emitting 1, 2, 0, and 3 detections for a..d, so the
/// num_faces values are 1, 2, +inf, 3. Stored in descending confidence, the
/// order backends emit.
std::map<std::string, std::vector<Detection>> fast_detections() {
  const Detection base{BoundingBox{10, 10, 30, 30}, 0.6};
  return {{"a", {base}},
          {"b", {{BoundingBox{40, 40, 60, 60}, 0.7}, base}},
          {"c", {}},
          {"d",
           {{BoundingBox{70, 70, 90, 90}, 0.8},
            {BoundingBox{40, 40, 60, 60}, 0.7},
            base}}};
}

std::map<std::string, std::vector<Detection>> slow_detections() {
  std::map<std::string, std::vector<Detection>> out;
  for (const std::string id : {"a", "b", "c", "d"}) {
    out[id] = {{BoundingBox{11, 11, 29, 29}, 0.99}};
  }
  return out;
}

PrecomputedBackend make_fast() {
  return {fast_detections(), BackendConfig{"fast", 0.0, 0.28}};
}

PrecomputedBackend make_slow() {
  return {slow_detections(), BackendConfig{"slow", 0.0, 1.89}};
}

}  // namespace

TEST_CASE("timing model rejects nonsense") {
  CHECK_NOTHROW(TimingModel{}.validate());
  CHECK_THROWS_AS((TimingModel{-0.1, 1.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((TimingModel{1.0, 1.0, -0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((TimingModel{2.0, 1.0, 0.0}.validate()), ConfigError);
  CHECK_NOTHROW((TimingModel{1.0, 1.0, 0.0}.validate()));
}

TEST_CASE("expected cost matches the closed form") {
  const TimingModel afw{0.28, 1.89, 0.05};

  SECTION("boundaries pay no splitting overhead") {
    const auto all_fast = detsplit::expected_cost(1.0, afw, false);
    CHECK(all_fast.avg_seconds == 0.28);
    CHECK(all_fast.overhead_seconds == 0.0);
    const auto all_slow = detsplit::expected_cost(0.0, afw, true);
    CHECK(all_slow.avg_seconds == 1.89);
    CHECK(all_slow.overhead_seconds == 0.0);
  }

  SECTION("score-table criteria pay the predictor everywhere inside") {
    const auto c75 = detsplit::expected_cost(0.75, afw, false);
    CHECK_THAT(c75.avg_seconds, Catch::Matchers::WithinAbs(0.7325, 1e-12));
    CHECK(c75.overhead_seconds == 0.05);
    const auto c50 = detsplit::expected_cost(0.5, afw, false);
    CHECK_THAT(c50.avg_seconds, Catch::Matchers::WithinAbs(1.135, 1e-12));
    const auto c25 = detsplit::expected_cost(0.25, afw, false);
    CHECK_THAT(c25.avg_seconds, Catch::Matchers::WithinAbs(1.5375, 1e-12));
    CHECK_THAT(c25.detection_seconds,
               Catch::Matchers::WithinAbs(1.4875, 1e-12));
  }

  SECTION("detector-based criteria waste a fast pass on hard images") {
    const auto c75 = detsplit::expected_cost(0.75, afw, true);
    CHECK_THAT(c75.overhead_seconds, Catch::Matchers::WithinAbs(0.07, 1e-12));
    CHECK_THAT(c75.avg_seconds, Catch::Matchers::WithinAbs(0.7525, 1e-12));
    const auto c50 = detsplit::expected_cost(0.5, afw, true);
    CHECK_THAT(c50.avg_seconds, Catch::Matchers::WithinAbs(1.225, 1e-12));
    const auto c25 = detsplit::expected_cost(0.25, afw, true);
    CHECK_THAT(c25.avg_seconds, Catch::Matchers::WithinAbs(1.6975, 1e-12));
  }

  SECTION("bad inputs are rejected") {
    CHECK_THROWS_AS(detsplit::expected_cost(-0.1, afw, false), ConfigError);
    CHECK_THROWS_AS(detsplit::expected_cost(1.1, afw, false), ConfigError);
    CHECK_THROWS_AS(
        detsplit::expected_cost(0.5, TimingModel{2.0, 1.0, 0.0}, false),
        ConfigError);
  }
}

TEST_CASE("route handles one image with a single fast pass") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();
  const ScoreTableRegistry no_tables;
  const CriterionSpec spec = CriterionSpec::parse("num_faces");

  SECTION("easy image reuses the criterion's fast output") {
    const auto [decision, output] =
        detsplit::route(dataset.images[0], spec, no_tables, 2.0, fast, slow);
    CHECK(decision.easy);
    CHECK(decision.criterion_value == 1.0);
    CHECK(decision.chosen_backend == "fast");
    CHECK(decision.fast_output_reused);
    CHECK(output.detections == fast_detections().at("a"));
    CHECK(fast.call_count() == 1);
    CHECK(slow.call_count() == 0);
  }

  SECTION("hard image still pays exactly one fast pass") {
    const auto [decision, output] =
        detsplit::route(dataset.images[3], spec, no_tables, 2.0, fast, slow);
    CHECK_FALSE(decision.easy);
    CHECK(decision.criterion_value == 3.0);
    CHECK(decision.chosen_backend == "slow");
    CHECK_FALSE(decision.fast_output_reused);
    CHECK(output.detections == slow_detections().at("d"));
    CHECK(fast.call_count() == 1);
    CHECK(slow.call_count() == 1);
  }

  SECTION("zero detections route hard under any finite threshold") {
    const auto [decision, output] = detsplit::route(
        dataset.images[2], spec, no_tables, 1e300, fast, slow);
    CHECK_FALSE(decision.easy);
    CHECK(decision.criterion_value == kInfinity);
  }
}

TEST_CASE("route_batch with a detector-based criterion runs fast once per image") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();
  const ScoreTableRegistry no_tables;
  const CriterionSpec spec = CriterionSpec::parse("num_faces");

  const auto run = detsplit::route_batch(
      dataset, spec, SplitSpec::by_threshold(2.0), no_tables, fast, slow);

  CHECK(fast.call_count() == 4);
  CHECK(slow.call_count() == 2);

  REQUIRE(run.plan.decisions.size() == 4);
  CHECK(std::is_sorted(run.plan.decisions.begin(), run.plan.decisions.end(),
                       [](const auto& x, const auto& y) {
                         return x.image_id < y.image_id;
                       }));
  CHECK(run.plan.threshold == 2.0);
  CHECK(run.plan.easy_count() == 2);
  CHECK(run.plan.easy_fraction() == 0.5);

  const auto expected_fast = fast_detections();
  const auto expected_slow = slow_detections();
  for (const auto& decision : run.plan.decisions) {
    const auto& output = run.outputs.at(decision.image_id);
    if (decision.easy) {
      CHECK(decision.fast_output_reused);
      CHECK(decision.chosen_backend == "fast");
      CHECK(output.detections == expected_fast.at(decision.image_id));
    } else {
      CHECK_FALSE(decision.fast_output_reused);
      CHECK(decision.chosen_backend == "slow");
      CHECK(output.detections == expected_slow.at(decision.image_id));
    }
  }
  CHECK(run.plan.decisions[0].easy);        // a: 1 face
  CHECK(run.plan.decisions[1].easy);        // b: 2 faces
  CHECK_FALSE(run.plan.decisions[2].easy);  // c: no detections, +inf
  CHECK_FALSE(run.plan.decisions[3].easy);  // d: 3 faces
}

TEST_CASE("route_batch with a score table only runs fast on easy images") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();

  detsplit::ScoreTable table;
  table.insert("a", 0.1);
  table.insert("b", 0.9);
  table.insert("c", 0.5);
  table.insert("d", 0.3);
  ScoreTableRegistry tables;
  tables.emplace("diff", std::move(table));
  const CriterionSpec spec = CriterionSpec::parse("difficulty:diff");

  const auto run = detsplit::route_batch(
      dataset, spec, SplitSpec::by_threshold(0.4), tables, fast, slow);

  CHECK(fast.call_count() == 2);
  CHECK(slow.call_count() == 2);
  CHECK(run.plan.easy_count() == 2);
  for (const auto& decision : run.plan.decisions) {
    CHECK_FALSE(decision.fast_output_reused);
    const bool expect_easy =
        decision.image_id == "a" || decision.image_id == "d";
    CHECK(decision.easy == expect_easy);
  }
}

TEST_CASE("fraction splits record the realized threshold") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();
  const ScoreTableRegistry no_tables;
  const CriterionSpec spec = CriterionSpec::parse("num_faces");

  // Criterion values: a=1, b=2, c=+inf, d=3.
  const auto half = detsplit::route_batch(
      dataset, spec, SplitSpec::by_fraction(0.5), no_tables, fast, slow);
  CHECK(half.plan.easy_count() == 2);
  CHECK(half.plan.threshold == 2.0);

  const auto quarter = detsplit::route_batch(
      dataset, spec, SplitSpec::by_fraction(0.25), no_tables, fast, slow);
  CHECK(quarter.plan.easy_count() == 1);
  CHECK(quarter.plan.threshold == 1.0);

  const auto none = detsplit::route_batch(
      dataset, spec, SplitSpec::by_fraction(0.0), no_tables, fast, slow);
  CHECK(none.plan.easy_count() == 0);
  CHECK(none.plan.threshold == -kInfinity);

  const auto all = detsplit::route_batch(
      dataset, spec, SplitSpec::by_fraction(1.0), no_tables, fast, slow);
  CHECK(all.plan.easy_count() == 4);
  CHECK(all.plan.threshold == kInfinity);
  // Even the image with no detections is routed easy by rank.
  CHECK(all.outputs.at("c").detections.empty());
}

TEST_CASE("compute_cost reflects the realized split") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();
  const ScoreTableRegistry no_tables;
  const CriterionSpec spec = CriterionSpec::parse("num_faces");
  const TimingModel timing{0.28, 1.89, 0.05};

  const auto half = detsplit::route_batch(
      dataset, spec, SplitSpec::by_fraction(0.5), no_tables, fast, slow);
  const auto cost = detsplit::compute_cost(half.plan, timing);
  const auto direct = detsplit::expected_cost(0.5, timing, true);
  CHECK(cost.avg_seconds == direct.avg_seconds);
  CHECK(cost.overhead_seconds == direct.overhead_seconds);

  const auto all = detsplit::route_batch(
      dataset, spec, SplitSpec::by_fraction(1.0), no_tables, fast, slow);
  CHECK(detsplit::compute_cost(all.plan, timing).overhead_seconds == 0.0);
  CHECK(detsplit::compute_cost(all.plan, timing).avg_seconds == 0.28);
}

TEST_CASE("routing rejects bad configurations") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();
  const ScoreTableRegistry no_tables;

  CHECK_THROWS_AS(SplitSpec::by_fraction(-0.01), ConfigError);
  CHECK_THROWS_AS(SplitSpec::by_fraction(1.01), ConfigError);

  CHECK_THROWS_AS(
      detsplit::route_batch(Dataset{}, CriterionSpec::parse("num_faces"),
                            SplitSpec::by_fraction(0.5), no_tables, fast,
                            slow),
      InputError);

  // A score-table criterion whose table was never loaded.
  CHECK_THROWS_MATCHES(
      detsplit::route_batch(dataset, CriterionSpec::parse("difficulty:nope"),
                            SplitSpec::by_fraction(0.5), no_tables, fast,
                            slow),
      ConfigError,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("nope")));

  // Detector-based values cannot be computed without the fast output.
  CHECK_THROWS_AS(
      detsplit::criterion_value_for_image(CriterionSpec::parse("num_faces"),
                                          dataset.images[0], no_tables,
                                          nullptr),
      ConfigError);
}

TEST_CASE("avg_face_size and faces_over_avg_size route by the same machinery") {
  const Dataset dataset = four_image_dataset();
  const auto fast = make_fast();
  const auto slow = make_slow();
  const ScoreTableRegistry no_tables;

  // Every fast detection is 20x20 inside 100x100. Averages mirror the
  // library's left-to-right accumulation so the comparisons stay exact.
  const double r = std::sqrt(400.0 / 10000.0);
  const double avg1 = r;
  const double avg2 = (r + r) / 2.0;
  const double avg3 = (r + r + r) / 3.0;

  const auto size_run = detsplit::route_batch(
      dataset, CriterionSpec::parse("avg_face_size"),
      SplitSpec::by_threshold(-0.1), no_tables, fast, slow);
  const auto& sizes = size_run.plan.decisions;
  CHECK(sizes[0].criterion_value == -avg1);
  CHECK(sizes[1].criterion_value == -avg2);
  CHECK(sizes[2].criterion_value == kInfinity);
  CHECK(sizes[3].criterion_value == -avg3);
  CHECK(sizes[0].easy);
  CHECK(sizes[1].easy);
  CHECK_FALSE(sizes[2].easy);
  CHECK(sizes[3].easy);

  const auto ratio_run = detsplit::route_batch(
      dataset, CriterionSpec::parse("faces_over_avg_size"),
      SplitSpec::by_threshold(10.0), no_tables, fast, slow);
  const auto& decisions = ratio_run.plan.decisions;
  CHECK(decisions[0].criterion_value == 1.0 / avg1);  // a
  CHECK(decisions[1].criterion_value == 2.0 / avg2);  // b
  CHECK(decisions[2].criterion_value == kInfinity);   // c
  CHECK(decisions[3].criterion_value == 3.0 / avg3);  // d
  CHECK(decisions[0].easy);
  CHECK(decisions[1].easy);
  CHECK_FALSE(decisions[2].easy);
  CHECK_FALSE(decisions[3].easy);
}
