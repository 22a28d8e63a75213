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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/difficulty.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/eval.hpp"
#include "detsplit/rng.hpp"
#include "detsplit/router.hpp"

namespace detsplit {

/// One sweep: every criterion crossed with every easy fraction, plus a
/// random-assignment baseline at the same fractions.
struct ExperimentConfig {
  std::vector<CriterionSpec> criteria;
  std::vector<double> split_grid = {1.0, 0.75, 0.5, 0.25, 0.0};
  TimingModel timing;
  std::size_t baseline_runs = 5;
  std::uint64_t baseline_seed = 0;
  double roc_fp_axis = 0.0;  // 0 picks each curve's own extent

  void validate() const {
    if (criteria.empty()) throw ConfigError("need at least one criterion");
    if (split_grid.empty()) throw ConfigError("split grid must be non-empty");
    for (double p : split_grid) {
      if (p < 0.0 || p > 1.0) {
        throw ConfigError("split fractions must be in [0,1]");
      }
    }
    if (baseline_runs == 0) throw ConfigError("baseline_runs must be >= 1");
    if (roc_fp_axis < 0.0) throw ConfigError("roc_fp_axis must be >= 0");
    timing.validate();
  }
};

/// Metrics and cost for one (criterion, split) cell.
struct CellResult {
  EvalReport eval;
  CostReport cost;
  std::size_t easy_count = 0;
};

/// Random-baseline aggregate at one split: per-metric mean and sample
/// standard deviation over the runs, plus the (deterministic) cost. Random
/// assignment needs no criterion, so its cost carries no overhead.
struct BaselineCell {
  EvalReport mean;
  EvalReport stddev;
  CostReport cost;
};

struct SweepResult {
  std::vector<std::string> criterion_names;
  std::vector<double> splits;
  std::map<std::string, std::map<double, CellResult>> cells;
  std::map<double, BaselineCell> baseline;
  TimingModel timing;
};

namespace detail {

inline double sample_stddev(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

/// Evaluate one random split: exactly round(p*N) images go to the fast
/// detector, chosen by ranking per-image uniform draws keyed on
/// (seed, image id). Ties in the draw break by image id.
inline std::map<std::string, DetectorOutput> random_assignment(
    const Dataset& dataset, double easy_fraction, std::uint64_t seed,
    const DetectorBackend& fast, const DetectorBackend& slow) {
  if (dataset.images.empty()) {
    throw InputError("cannot route an empty dataset");
  }
  std::vector<CriterionScore> draws;
  draws.reserve(dataset.images.size());
  for (const auto& image : dataset.images) {
    RandomStream stream(seed, image.id, Draw::kBaselineSubset);
    draws.push_back({image.id, stream.uniform()});
  }
  const SplitResult split = rank_split(draws, easy_fraction);

  std::map<std::string, DetectorOutput> outputs;
  for (const auto& id : split.easy_ids) {
    outputs[id] = fast.detect(*dataset.find(id));
  }
  for (const auto& id : split.hard_ids) {
    outputs[id] = slow.detect(*dataset.find(id));
  }
  return outputs;
}

/// Run the random baseline at one split fraction: `runs` independent
/// assignments (seed offset by run index), each evaluated, then aggregated.
inline BaselineCell random_baseline(const Dataset& dataset,
                                    const DetectorBackend& fast,
                                    const DetectorBackend& slow,
                                    double easy_fraction, std::size_t runs,
                                    std::uint64_t seed, double roc_fp_axis,
                                    const TimingModel& timing) {
  if (runs == 0) throw ConfigError("baseline_runs must be >= 1");
  std::vector<double> ap, disc, cont;
  ap.reserve(runs);
  disc.reserve(runs);
  cont.reserve(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    const auto outputs =
        random_assignment(dataset, easy_fraction, seed + run, fast, slow);
    const MatchResult match = match_detections(outputs, dataset);
    const EvalReport report = evaluate(match, roc_fp_axis);
    ap.push_back(report.ap);
    disc.push_back(report.disc_roc);
    cont.push_back(report.cont_roc);
  }
  auto mean = [](const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };

  BaselineCell cell;
  cell.mean = {mean(ap), mean(disc), mean(cont)};
  cell.stddev = {detail::sample_stddev(ap, cell.mean.ap),
                 detail::sample_stddev(disc, cell.mean.disc_roc),
                 detail::sample_stddev(cont, cell.mean.cont_roc)};
  const double realized =
      static_cast<double>(
          easy_count_for_fraction(easy_fraction, dataset.images.size())) /
      static_cast<double>(dataset.images.size());
  CostReport cost = expected_cost(realized, timing, false);
  cost.overhead_seconds = 0.0;
  cost.avg_seconds = cost.detection_seconds;
  cell.cost = cost;
  return cell;
}

/// Full cross product of criteria and split fractions plus the baseline.
/// Each cell routes the whole dataset, matches against ground truth, and
/// records quality and modeled latency.
inline SweepResult run_sweep(const Dataset& dataset,
                             const ScoreTableRegistry& tables,
                             const DetectorBackend& fast,
                             const DetectorBackend& slow,
                             const ExperimentConfig& config) {
  config.validate();
  if (dataset.images.empty()) {
    throw InputError("cannot sweep an empty dataset");
  }

  SweepResult result;
  result.splits = config.split_grid;
  result.timing = config.timing;

  for (const auto& spec : config.criteria) {
    const std::string name = spec.display_name();
    if (result.cells.contains(name)) {
      throw ConfigError("criterion '" + name + "' listed twice");
    }
    result.criterion_names.push_back(name);
    for (double p : config.split_grid) {
      const RoutedRun run = route_batch(dataset, spec,
                                        SplitSpec::by_fraction(p), tables,
                                        fast, slow);
      CellResult cell;
      cell.easy_count = run.plan.easy_count();
      const MatchResult match = match_detections(run.outputs, dataset);
      cell.eval = evaluate(match, config.roc_fp_axis);
      cell.cost = expected_cost(run.plan.easy_fraction(), config.timing,
                                spec.detector_based());
      result.cells[name][p] = cell;
    }
  }

  for (double p : config.split_grid) {
    result.baseline[p] =
        random_baseline(dataset, fast, slow, p, config.baseline_runs,
                        config.baseline_seed, config.roc_fp_axis,
                        config.timing);
  }
  return result;
}

}  // namespace detsplit
