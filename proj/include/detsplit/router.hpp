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

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/difficulty.hpp"
#include "detsplit/errors.hpp"

namespace detsplit {

/// Per-image latency model (seconds): the two detector passes plus the cost
/// of an external difficulty predictor.
struct TimingModel {
  double fast_s = 0.28;
  double slow_s = 1.89;
  double predictor_s = 0.05;

  void validate() const {
    if (fast_s < 0.0 || slow_s < 0.0 || predictor_s < 0.0) {
      throw ConfigError("timing values must be non-negative");
    }
    if (fast_s > slow_s) {
      throw ConfigError("fast detector must not be slower than the slow one");
    }
  }
};

/// How one image was routed.
struct RoutingDecision {
  std::string image_id;
  double criterion_value = 0.0;
  bool easy = false;
  std::string chosen_backend;
  // True when the criterion already ran the fast detector and its output was
  // handed on unchanged instead of detecting again.
  bool fast_output_reused = false;
};

/// Whole-batch routing record.
struct RoutingPlan {
  std::vector<RoutingDecision> decisions;  // sorted by image id
  CriterionSpec criterion;
  double threshold = 0.0;

  std::size_t easy_count() const {
    std::size_t n = 0;
    for (const auto& d : decisions) n += d.easy ? 1 : 0;
    return n;
  }

  double easy_fraction() const {
    if (decisions.empty()) return 0.0;
    return static_cast<double>(easy_count()) /
           static_cast<double>(decisions.size());
  }
};

/// Split request: either an explicit criterion threshold or a target easy
/// fraction realized by rank (exactly round(p*N) easy images).
struct SplitSpec {
  enum class Mode { kThreshold, kFraction };
  Mode mode = Mode::kThreshold;
  double value = 0.0;

  static SplitSpec by_threshold(double t) { return {Mode::kThreshold, t}; }

  static SplitSpec by_fraction(double p) {
    if (p < 0.0 || p > 1.0) {
      throw ConfigError("easy fraction must be in [0,1]");
    }
    return {Mode::kFraction, p};
  }
};

/// Routing outcome: the plan plus the detector output chosen for every image.
struct RoutedRun {
  RoutingPlan plan;
  std::map<std::string, DetectorOutput> outputs;
};

/// Criterion value of a single image. Detector-based criteria take the fast
/// detector's already-computed output; external ones read the score table.
inline double criterion_value_for_image(
    const CriterionSpec& spec, const ImageRecord& image,
    const ScoreTableRegistry& tables, const DetectorOutput* fast_output) {
  if (!spec.detector_based()) {
    auto it = tables.find(spec.table);
    if (it == tables.end()) {
      throw ConfigError("no score table named '" + spec.table + "'");
    }
    return it->second.at(image.id);
  }
  if (fast_output == nullptr) {
    throw ConfigError("detector-based criterion needs the fast output");
  }
  return criterion_value(spec.kind, criterion_features(*fast_output, image));
}

/// Route one image by threshold. For detector-based criteria the fast pass
/// happens exactly once; when the image lands easy that same output is the
/// result.
inline std::pair<RoutingDecision, DetectorOutput> route(
    const ImageRecord& image, const CriterionSpec& spec,
    const ScoreTableRegistry& tables, double threshold,
    const DetectorBackend& fast, const DetectorBackend& slow) {
  RoutingDecision decision;
  decision.image_id = image.id;
  DetectorOutput output;
  if (spec.detector_based()) {
    DetectorOutput fast_output = fast.detect(image);
    decision.criterion_value =
        criterion_value_for_image(spec, image, tables, &fast_output);
    decision.easy = decision.criterion_value <= threshold;
    if (decision.easy) {
      decision.fast_output_reused = true;
      output = std::move(fast_output);
    } else {
      output = slow.detect(image);
    }
  } else {
    decision.criterion_value =
        criterion_value_for_image(spec, image, tables, nullptr);
    decision.easy = decision.criterion_value <= threshold;
    output = decision.easy ? fast.detect(image) : slow.detect(image);
  }
  decision.chosen_backend =
      decision.easy ? fast.config().name : slow.config().name;
  return {std::move(decision), std::move(output)};
}

/// Route a whole dataset. Criterion values are computed for every image
/// first (one fast pass per image for detector-based criteria, reused for
/// the easy ones), then the split is applied and hard images go to the slow
/// detector.
inline RoutedRun route_batch(const Dataset& dataset, const CriterionSpec& spec,
                             const SplitSpec& split,
                             const ScoreTableRegistry& tables,
                             const DetectorBackend& fast,
                             const DetectorBackend& slow) {
  if (dataset.images.empty()) {
    throw InputError("cannot route an empty dataset");
  }

  std::map<std::string, DetectorOutput> fast_outputs;
  std::vector<CriterionScore> values;
  values.reserve(dataset.images.size());
  for (const auto& image : dataset.images) {
    const DetectorOutput* fast_ptr = nullptr;
    if (spec.detector_based()) {
      auto [it, unused] = fast_outputs.emplace(image.id, fast.detect(image));
      fast_ptr = &it->second;
    }
    values.push_back(
        {image.id, criterion_value_for_image(spec, image, tables, fast_ptr)});
  }

  SplitResult parts;
  double recorded_threshold = 0.0;
  if (split.mode == SplitSpec::Mode::kThreshold) {
    parts = threshold_split(values, split.value);
    recorded_threshold = split.value;
  } else {
    parts = rank_split(values, split.value);
    if (parts.easy_ids.empty()) {
      recorded_threshold = -kInfinity;
    } else if (parts.hard_ids.empty()) {
      recorded_threshold = kInfinity;
    } else {
      // The achieved cut: the largest value routed easy. Ties straddling the
      // cut mean a plain threshold comparison would not reproduce this split.
      recorded_threshold = -kInfinity;
      std::map<std::string, double> by_id;
      for (const auto& v : values) by_id[v.image_id] = v.value;
      for (const auto& id : parts.easy_ids) {
        recorded_threshold = std::max(recorded_threshold, by_id[id]);
      }
    }
  }

  std::map<std::string, bool> easy_by_id;
  for (const auto& id : parts.easy_ids) easy_by_id[id] = true;
  for (const auto& id : parts.hard_ids) easy_by_id[id] = false;

  RoutedRun run;
  run.plan.criterion = spec;
  run.plan.threshold = recorded_threshold;
  std::map<std::string, double> value_by_id;
  for (const auto& v : values) value_by_id[v.image_id] = v.value;

  for (const auto& image : dataset.images) {
    RoutingDecision decision;
    decision.image_id = image.id;
    decision.criterion_value = value_by_id[image.id];
    decision.easy = easy_by_id[image.id];
    decision.chosen_backend =
        decision.easy ? fast.config().name : slow.config().name;
    if (decision.easy) {
      if (spec.detector_based()) {
        decision.fast_output_reused = true;
        run.outputs[image.id] = std::move(fast_outputs[image.id]);
      } else {
        run.outputs[image.id] = fast.detect(image);
      }
    } else {
      run.outputs[image.id] = slow.detect(image);
    }
    run.plan.decisions.push_back(std::move(decision));
  }
  return run;
}

/// Average per-image latency split into its two parts.
struct CostReport {
  double avg_seconds = 0.0;
  double detection_seconds = 0.0;
  double overhead_seconds = 0.0;
};

/// Closed-form latency at easy fraction p. Detection always costs
/// p*fast + (1-p)*slow. Splitting overhead applies only at interior
/// fractions: a score-table criterion pays the predictor on every image,
/// while a detector-based criterion pays a wasted fast pass on the hard ones.
/// At p=0 or p=1 the whole batch goes to one detector and no criterion needs
/// evaluating.
inline CostReport expected_cost(double easy_fraction, const TimingModel& timing,
                                bool detector_based) {
  if (easy_fraction < 0.0 || easy_fraction > 1.0) {
    throw ConfigError("easy fraction must be in [0,1]");
  }
  timing.validate();
  CostReport report;
  report.detection_seconds = easy_fraction * timing.fast_s +
                             (1.0 - easy_fraction) * timing.slow_s;
  const bool interior = easy_fraction > 0.0 && easy_fraction < 1.0;
  if (interior) {
    report.overhead_seconds = detector_based
                                  ? (1.0 - easy_fraction) * timing.fast_s
                                  : timing.predictor_s;
  }
  report.avg_seconds = report.detection_seconds + report.overhead_seconds;
  return report;
}

inline CostReport compute_cost(const RoutingPlan& plan,
                               const TimingModel& timing) {
  return expected_cost(plan.easy_fraction(), timing,
                       plan.criterion.detector_based());
}

}  // namespace detsplit
