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
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/errors.hpp"

namespace detsplit {

/// Externally produced per-image difficulty scores (higher = harder). The
/// table must be total on the evaluated dataset: a missing id is an error,
/// never a default.
class ScoreTable {
 public:
  ScoreTable() = default;

  void insert(std::string id, double score) {
    auto [it, inserted] = scores_.emplace(std::move(id), score);
    if (!inserted) {
      throw InputError("duplicate id '" + it->first + "' in score table");
    }
  }

  double at(const std::string& id) const {
    auto it = scores_.find(id);
    if (it == scores_.end()) {
      throw InputError("score table has no entry for image id '" + id + "'");
    }
    return it->second;
  }

  bool contains(const std::string& id) const { return scores_.contains(id); }
  std::size_t size() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }

  const std::map<std::string, double>& entries() const { return scores_; }

 private:
  std::map<std::string, double> scores_;
};

/// Named score tables available to a run.
using ScoreTableRegistry = std::map<std::string, ScoreTable>;

/// Parse the score-table CSV: header "id,score", one row per image, UTF-8.
inline ScoreTable load_score_table(std::istream& in) {
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!saw_header) {
      std::string stripped = line;
      std::erase_if(stripped, [](char c) { return c == ' ' || c == '\t'; });
      if (stripped != "id,score") {
        throw InputError("line " + std::to_string(line_no) +
                         ": expected 'id,score' header");
      }
      saw_header = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) {
      throw InputError("line " + std::to_string(line_no) +
                       ": expected 'id,score' row");
    }
    const std::string id = line.substr(0, comma);
    double score = 0.0;
    try {
      std::size_t pos = 0;
      score = std::stod(line.substr(comma + 1), &pos);
      std::string rest = line.substr(comma + 1 + pos);
      if (rest.find_first_not_of(" \t") != std::string::npos) {
        throw std::invalid_argument("");
      }
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(line_no) +
                       ": invalid score value");
    }
    if (table.contains(id)) {
      throw InputError("line " + std::to_string(line_no) + ": duplicate id '" +
                       id + "' in score table");
    }
    table.insert(id, score);
  }
  return table;
}

/// Serialize a score table back to CSV (full precision).
inline std::string serialize_score_table(const ScoreTable& table) {
  std::string out = "id,score\n";
  char buf[64];
  for (const auto& [id, score] : table.entries()) {
    std::snprintf(buf, sizeof(buf), "%.17g", score);
    out += id;
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

/// The families of splitting criteria. External tables hold predicted
/// difficulty scores; the other three derive hardness from the fast
/// detector's output on the image.
enum class CriterionKind {
  kExternalDifficulty,
  kNumFaces,
  kAvgFaceSize,
  kFacesOverAvgSize,
};

/// A concrete criterion choice; external difficulty carries the name of the
/// score table to consult.
struct CriterionSpec {
  CriterionKind kind = CriterionKind::kNumFaces;
  std::string table;  // set only for kExternalDifficulty

  bool detector_based() const {
    return kind != CriterionKind::kExternalDifficulty;
  }

  std::string display_name() const {
    switch (kind) {
      case CriterionKind::kExternalDifficulty:
        return "difficulty:" + table;
      case CriterionKind::kNumFaces:
        return "num_faces";
      case CriterionKind::kAvgFaceSize:
        return "avg_face_size";
      case CriterionKind::kFacesOverAvgSize:
        return "faces_over_avg_size";
    }
    return "unknown";
  }

  /// Parse "num_faces" | "avg_face_size" | "faces_over_avg_size" |
  /// "difficulty:<table>".
  static CriterionSpec parse(std::string_view token) {
    if (token == "num_faces") return {CriterionKind::kNumFaces, {}};
    if (token == "avg_face_size") return {CriterionKind::kAvgFaceSize, {}};
    if (token == "faces_over_avg_size")
      return {CriterionKind::kFacesOverAvgSize, {}};
    constexpr std::string_view prefix = "difficulty:";
    if (token.starts_with(prefix) && token.size() > prefix.size()) {
      return {CriterionKind::kExternalDifficulty,
              std::string(token.substr(prefix.size()))};
    }
    throw ConfigError("unknown criterion '" + std::string(token) +
                      "' (expected num_faces, avg_face_size, "
                      "faces_over_avg_size, or difficulty:<table>)");
  }

  friend bool operator==(const CriterionSpec&, const CriterionSpec&) = default;
};

/// Features the detector-based criteria are built from: number of detections
/// and their mean relative size (absent when nothing was detected).
struct CriterionFeatures {
  std::size_t num_detections = 0;
  std::optional<double> avg_relative_size;
};

/// Per-image hardness value. Orientation is fixed to "higher = harder"; the
/// value is +infinity exactly when a detector-based criterion saw zero
/// detections.
struct CriterionScore {
  std::string image_id;
  double value = 0.0;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Summarize a detector output on its image. Detection boxes are clamped to
/// the image extent before sizing; avg is absent iff there are no detections.
inline CriterionFeatures criterion_features(const DetectorOutput& output,
                                            const ImageRecord& image) {
  CriterionFeatures features;
  features.num_detections = output.detections.size();
  if (features.num_detections == 0) return features;
  double sum = 0.0;
  for (const auto& d : output.detections) {
    const BoundingBox clamped =
        clamp_to_extent(d.box, image.width, image.height);
    sum += relative_face_size(clamped, image);
  }
  features.avg_relative_size =
      sum / static_cast<double>(features.num_detections);
  return features;
}

/// Hardness value of a detector-based criterion: num_faces -> n (fewer is
/// easier), avg_face_size -> -avg (bigger is easier), faces_over_avg_size ->
/// n/avg (fewer and bigger is easier). Zero detections always map to the
/// +infinity sentinel.
inline double criterion_value(CriterionKind kind,
                              const CriterionFeatures& features) {
  if (kind == CriterionKind::kExternalDifficulty) {
    throw ConfigError(
        "external difficulty is resolved through a score table, not detector "
        "features");
  }
  if (features.num_detections == 0) return kInfinity;
  const double n = static_cast<double>(features.num_detections);
  const double avg = features.avg_relative_size.value_or(0.0);
  switch (kind) {
    case CriterionKind::kNumFaces:
      return n;
    case CriterionKind::kAvgFaceSize:
      return -avg;
    case CriterionKind::kFacesOverAvgSize:
      return avg > 0.0 ? n / avg : kInfinity;
    default:
      return kInfinity;
  }
}

/// Deterministic easy/hard partition by image id.
struct SplitResult {
  std::vector<std::string> easy_ids;
  std::vector<std::string> hard_ids;
};

/// Number of images routed to the fast detector at easy-fraction p: exactly
/// round(p*N).
inline std::size_t easy_count_for_fraction(double p, std::size_t n) {
  const auto k = static_cast<long long>(
      std::llround(p * static_cast<double>(n)));
  return static_cast<std::size_t>(
      std::clamp<long long>(k, 0, static_cast<long long>(n)));
}

namespace detail {

inline std::vector<const CriterionScore*> sorted_by_value_then_id(
    const std::vector<CriterionScore>& values) {
  std::vector<const CriterionScore*> order;
  order.reserve(values.size());
  for (const auto& v : values) order.push_back(&v);
  std::sort(order.begin(), order.end(),
            [](const CriterionScore* a, const CriterionScore* b) {
              if (a->value != b->value) return a->value < b->value;
              return a->image_id < b->image_id;
            });
  return order;
}

}  // namespace detail

/// Threshold t such that at least ceil(p*N) values satisfy v <= t, and t is
/// the smallest value achieving that bound. p=0 gives -infinity (nothing
/// easy), p=1 gives +infinity (everything easy).
inline double calibrate_threshold(const std::vector<CriterionScore>& values,
                                  double easy_fraction) {
  if (easy_fraction < 0.0 || easy_fraction > 1.0) {
    throw ConfigError("easy_fraction must be in [0,1]");
  }
  if (easy_fraction == 0.0) return -kInfinity;
  if (easy_fraction == 1.0) return kInfinity;
  if (values.empty()) {
    throw InputError(
        "calibrate_threshold requires non-empty values for interior "
        "fractions");
  }
  const double n = static_cast<double>(values.size());
  // Guard against binary representation pushing an exact p*N over the next
  // integer (e.g. 0.1 * 10).
  auto k = static_cast<std::size_t>(std::ceil(easy_fraction * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (const auto& v : values) sorted.push_back(v.value);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return sorted[k - 1];
}

/// Partition with exactly round(p*N) easy images: the lowest criterion
/// values, ties broken by lexicographic image id.
inline SplitResult rank_split(const std::vector<CriterionScore>& values,
                              double easy_fraction) {
  if (easy_fraction < 0.0 || easy_fraction > 1.0) {
    throw ConfigError("easy_fraction must be in [0,1]");
  }
  const std::size_t k = easy_count_for_fraction(easy_fraction, values.size());
  const auto order = detail::sorted_by_value_then_id(values);
  SplitResult split;
  split.easy_ids.reserve(k);
  split.hard_ids.reserve(values.size() - k);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < k ? split.easy_ids : split.hard_ids).push_back(order[i]->image_id);
  }
  std::sort(split.easy_ids.begin(), split.easy_ids.end());
  std::sort(split.hard_ids.begin(), split.hard_ids.end());
  return split;
}

/// Partition by value threshold: easy iff value <= t.
inline SplitResult threshold_split(const std::vector<CriterionScore>& values,
                                   double threshold) {
  SplitResult split;
  for (const auto& v : values) {
    (v.value <= threshold ? split.easy_ids : split.hard_ids)
        .push_back(v.image_id);
  }
  std::sort(split.easy_ids.begin(), split.easy_ids.end());
  std::sort(split.hard_ids.begin(), split.hard_ids.end());
  return split;
}

}  // namespace detsplit
