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
#include <map>
#include <string>
#include <vector>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/geometry.hpp"

namespace detsplit {

/// One ranked detection after matching against ground truth. matched_iou is
/// zero for false positives.
struct MatchedDetection {
  std::string image_id;
  double confidence = 0.0;
  bool is_tp = false;
  double matched_iou = 0.0;
  BoundingBox box;
};

/// Matching outcome over a whole dataset. Detections are globally ranked by
/// descending confidence; ties break by image id, then by box coordinates, so
/// every downstream metric is reproducible.
struct MatchResult {
  std::vector<MatchedDetection> detections;
  std::size_t num_gt_faces = 0;
  double iou_threshold = 0.5;
};

/// Greedy per-image matching: detections in confidence order each claim the
/// unmatched ground-truth box of highest overlap; a claim only counts (and
/// only consumes the box) when IoU exceeds the threshold strictly.
///
/// Coverage is strict in both directions: every dataset image needs an entry
/// in `outputs`, and every output id must exist in the dataset.
inline MatchResult match_detections(
    const std::map<std::string, DetectorOutput>& outputs,
    const Dataset& dataset, double iou_threshold = 0.5) {
  if (!(iou_threshold > 0.0) || !(iou_threshold < 1.0)) {
    throw ConfigError("iou_threshold must lie strictly inside (0,1)");
  }
  for (const auto& [id, unused] : outputs) {
    if (dataset.find(id) == nullptr) {
      throw InputError("detector output references unknown image id '" + id +
                       "'");
    }
  }

  MatchResult result;
  result.iou_threshold = iou_threshold;
  for (const auto& image : dataset.images) {
    result.num_gt_faces += image.faces.size();
    auto it = outputs.find(image.id);
    if (it == outputs.end()) {
      throw InputError("no detector output for image id '" + image.id + "'");
    }

    std::vector<Detection> ranked = it->second.detections;
    sort_by_confidence(ranked);

    std::vector<bool> taken(image.faces.size(), false);
    for (const auto& det : ranked) {
      double best_iou = 0.0;
      std::size_t best_gt = image.faces.size();
      for (std::size_t g = 0; g < image.faces.size(); ++g) {
        if (taken[g]) continue;
        const double overlap = iou(det.box, image.faces[g].box);
        if (overlap > best_iou) {
          best_iou = overlap;
          best_gt = g;
        }
      }
      MatchedDetection m;
      m.image_id = image.id;
      m.confidence = det.confidence;
      m.box = det.box;
      if (best_gt < image.faces.size() && best_iou > iou_threshold) {
        taken[best_gt] = true;
        m.is_tp = true;
        m.matched_iou = best_iou;
      }
      result.detections.push_back(std::move(m));
    }
  }

  std::sort(result.detections.begin(), result.detections.end(),
            [](const MatchedDetection& a, const MatchedDetection& b) {
              if (a.confidence != b.confidence)
                return a.confidence > b.confidence;
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.box < b.box;
            });
  return result;
}

/// Raw precision/recall point at one ranked detection.
struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

inline std::vector<PrPoint> pr_curve(const MatchResult& match) {
  if (match.num_gt_faces == 0) {
    throw InputError("precision/recall is undefined with zero ground-truth "
                     "faces");
  }
  std::vector<PrPoint> points;
  points.reserve(match.detections.size());
  double tp = 0.0;
  double fp = 0.0;
  for (const auto& det : match.detections) {
    (det.is_tp ? tp : fp) += 1.0;
    points.push_back({tp / static_cast<double>(match.num_gt_faces),
                      tp / (tp + fp)});
  }
  return points;
}

/// Average precision with all-points interpolation: at every rank where
/// recall increases, credit the recall step with the best precision achieved
/// at that rank or deeper.
inline double average_precision(const MatchResult& match) {
  const std::vector<PrPoint> points = pr_curve(match);
  std::vector<double> envelope(points.size());
  double running = 0.0;
  for (std::size_t i = points.size(); i-- > 0;) {
    running = std::max(running, points[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].recall > prev_recall) {
      ap += (points[i].recall - prev_recall) * envelope[i];
      prev_recall = points[i].recall;
    }
  }
  return ap;
}

/// Which detection-rate numerator the ROC uses: matched-detection count or
/// summed overlap of matched detections.
enum class RocMode { kDiscrete, kContinuous };

/// ROC point: cumulative false-positive count on x, detection rate on y.
struct RocPoint {
  double false_positives = 0.0;
  double rate = 0.0;
};

/// ROC polyline swept over distinct confidence values (descending), starting
/// at (0,0). Each point reflects all detections at or above that confidence.
inline std::vector<RocPoint> roc_curve(const MatchResult& match,
                                       RocMode mode) {
  if (match.num_gt_faces == 0) {
    throw InputError("detection rate is undefined with zero ground-truth "
                     "faces");
  }
  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  const double gt = static_cast<double>(match.num_gt_faces);
  double fp = 0.0;
  double numerator = 0.0;
  for (std::size_t i = 0; i < match.detections.size(); ++i) {
    const auto& det = match.detections[i];
    if (det.is_tp) {
      numerator += mode == RocMode::kDiscrete ? 1.0 : det.matched_iou;
    } else {
      fp += 1.0;
    }
    const bool last_of_group =
        i + 1 == match.detections.size() ||
        match.detections[i + 1].confidence != det.confidence;
    if (last_of_group) points.push_back({fp, numerator / gt});
  }
  return points;
}

/// Area under the ROC polyline, normalized to [0,1]. The curve is integrated
/// by the trapezoid rule up to fp_axis_max, extended flat past its last point
/// or clipped (with linear interpolation) when it overshoots. fp_axis_max of
/// zero selects the curve's own extent, but at least one false positive of
/// axis so a perfect run still normalizes.
inline double roc_area(const MatchResult& match, RocMode mode,
                       double fp_axis_max = 0.0) {
  if (fp_axis_max < 0.0) {
    throw ConfigError("fp_axis_max must be non-negative (0 = automatic)");
  }
  const std::vector<RocPoint> points = roc_curve(match, mode);
  const double curve_end = points.back().false_positives;
  const double axis =
      fp_axis_max > 0.0 ? fp_axis_max : std::max(1.0, curve_end);

  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const RocPoint& a = points[i - 1];
    const RocPoint& b = points[i];
    if (a.false_positives >= axis) break;
    if (b.false_positives <= a.false_positives) continue;
    if (b.false_positives <= axis) {
      area += (b.false_positives - a.false_positives) * (a.rate + b.rate) / 2.0;
    } else {
      const double t =
          (axis - a.false_positives) / (b.false_positives - a.false_positives);
      const double y_cut = a.rate + t * (b.rate - a.rate);
      area += (axis - a.false_positives) * (a.rate + y_cut) / 2.0;
      break;
    }
  }
  if (curve_end < axis) area += (axis - curve_end) * points.back().rate;
  return area / axis;
}

/// The three headline metrics of one detection run.
struct EvalReport {
  double ap = 0.0;
  double disc_roc = 0.0;
  double cont_roc = 0.0;
};

inline EvalReport evaluate(const MatchResult& match,
                           double fp_axis_max = 0.0) {
  return {average_precision(match),
          roc_area(match, RocMode::kDiscrete, fp_axis_max),
          roc_area(match, RocMode::kContinuous, fp_axis_max)};
}

}  // namespace detsplit
