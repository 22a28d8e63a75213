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

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/geometry.hpp"
#include "detsplit/rng.hpp"

namespace detsplit {

/// Parameters of the seeded detector simulator. A ground-truth face of
/// relative size s is detected with probability
///   p = quality * logistic(size_slope * (s - size_midpoint)),
/// detected boxes are jittered by +-localization_noise of the box side, and
/// Poisson(false_positive_rate) spurious boxes are added per image.
///
/// All draws are keyed by (seed, image id, face index, purpose): two configs
/// sharing a seed share their underlying draws, which makes a fast/slow pair
/// with q_slow >= q_fast, size_midpoint_slow <= size_midpoint_fast (equal
/// slopes), lambda_slow <= lambda_fast and eta_slow <= eta_fast per-image
/// dominant, not just dominant in expectation.
struct SyntheticDetectorConfig {
  double quality = 1.0;               // q in [0,1]
  double size_midpoint = 0.1;         // s0 in (0,1)
  double size_slope = 10.0;           // gamma > 0
  double false_positive_rate = 0.0;   // lambda >= 0, per image
  double localization_noise = 0.0;    // eta >= 0, fraction of box side
  double tp_confidence_floor = 0.5;   // c_tp in [0,1]
  double fp_confidence_ceiling = 0.4; // c_fp in [0,1], c_fp < c_tp
  std::uint64_t seed = 0;

  void validate() const {
    if (quality < 0.0 || quality > 1.0)
      throw ConfigError("synthetic detector: quality must be in [0,1]");
    if (size_midpoint <= 0.0 || size_midpoint >= 1.0)
      throw ConfigError("synthetic detector: size_midpoint must be in (0,1)");
    if (size_slope <= 0.0)
      throw ConfigError("synthetic detector: size_slope must be > 0");
    if (false_positive_rate < 0.0)
      throw ConfigError("synthetic detector: false_positive_rate must be >= 0");
    if (localization_noise < 0.0)
      throw ConfigError("synthetic detector: localization_noise must be >= 0");
    if (tp_confidence_floor < 0.0 || tp_confidence_floor > 1.0)
      throw ConfigError("synthetic detector: tp_confidence_floor in [0,1]");
    if (fp_confidence_ceiling < 0.0 || fp_confidence_ceiling > 1.0)
      throw ConfigError("synthetic detector: fp_confidence_ceiling in [0,1]");
    if (!(fp_confidence_ceiling < tp_confidence_floor))
      throw ConfigError(
          "synthetic detector: fp_confidence_ceiling must be < "
          "tp_confidence_floor");
  }
};

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Probability that the simulator fires on a face of the given relative size.
inline double detect_probability(const SyntheticDetectorConfig& cfg,
                                 double relative_size) {
  return cfg.quality *
         logistic(cfg.size_slope * (relative_size - cfg.size_midpoint));
}

/// A detection plus its provenance: the ground-truth face index it was
/// emitted from, or -1 for a spurious (false-positive) box.
struct TracedDetection {
  Detection detection;
  int source_face = -1;
};

namespace detail {

inline BoundingBox repair_box(BoundingBox b, double width, double height) {
  b = clamp_to_extent(b, width, height);
  if (b.x_min > b.x_max) std::swap(b.x_min, b.x_max);
  if (b.y_min > b.y_max) std::swap(b.y_min, b.y_max);
  const double eps = 1e-9 * std::max(width, height);
  if (b.x_min >= b.x_max) {
    b.x_min = std::max(0.0, b.x_min - eps);
    b.x_max = std::min(width, b.x_max + eps);
  }
  if (b.y_min >= b.y_max) {
    b.y_min = std::max(0.0, b.y_min - eps);
    b.y_max = std::min(height, b.y_max + eps);
  }
  return b;
}

}  // namespace detail

/// Run the simulator on one image, keeping per-detection provenance. Pure
/// function of (cfg, image): repeated calls are bit-identical, and the draw
/// keys make the result independent of evaluation order.
inline std::vector<TracedDetection> synthetic_detect_traced(
    const SyntheticDetectorConfig& cfg, const ImageRecord& image) {
  cfg.validate();
  const double w = image.width;
  const double h = image.height;
  std::vector<TracedDetection> result;

  for (std::size_t i = 0; i < image.faces.size(); ++i) {
    const BoundingBox& truth = image.faces[i].box;
    const double s = relative_face_size(truth, image);
    const double p = detect_probability(cfg, s);
    const double u = RandomStream(cfg.seed, image.id, Draw::kTpEvent, i)
                         .uniform();
    if (u >= p) continue;

    RandomStream jitter(cfg.seed, image.id, Draw::kTpJitter, i);
    const double eta = cfg.localization_noise;
    BoundingBox box{
        truth.x_min + jitter.symmetric() * eta * truth.width(),
        truth.y_min + jitter.symmetric() * eta * truth.height(),
        truth.x_max + jitter.symmetric() * eta * truth.width(),
        truth.y_max + jitter.symmetric() * eta * truth.height()};
    box = detail::repair_box(box, w, h);

    const double uc =
        RandomStream(cfg.seed, image.id, Draw::kTpConfidence, i).uniform();
    const double confidence =
        cfg.tp_confidence_floor + uc * (1.0 - cfg.tp_confidence_floor);
    result.push_back({{box, confidence}, static_cast<int>(i)});
  }

  const double u_count =
      RandomStream(cfg.seed, image.id, Draw::kFpCount).uniform();
  const int fp_count = poisson_from_uniform(cfg.false_positive_rate, u_count);
  const double diagonal = std::sqrt(w * w + h * h);
  for (int k = 0; k < fp_count; ++k) {
    RandomStream boxes(cfg.seed, image.id, Draw::kFpBox,
                       static_cast<std::uint64_t>(k));
    double side = boxes.uniform(0.02, 0.20) * diagonal;
    side = std::min(side, std::min(w, h));
    const double x0 = boxes.uniform() * (w - side);
    const double y0 = boxes.uniform() * (h - side);
    const double uc = RandomStream(cfg.seed, image.id, Draw::kFpConfidence,
                                   static_cast<std::uint64_t>(k))
                          .uniform();
    result.push_back(
        {{{x0, y0, x0 + side, y0 + side}, uc * cfg.fp_confidence_ceiling},
         -1});
  }
  return result;
}

/// Simulator output as a plain DetectorOutput (unfiltered, sorted by
/// descending confidence).
inline DetectorOutput synthetic_detect(const SyntheticDetectorConfig& cfg,
                                       const ImageRecord& image) {
  DetectorOutput out;
  out.image_id = image.id;
  for (const auto& traced : synthetic_detect_traced(cfg, image)) {
    out.detections.push_back(traced.detection);
  }
  sort_by_confidence(out.detections);
  return out;
}

/// Detector backend wrapping the simulator.
class SyntheticBackend final : public DetectorBackend {
 public:
  SyntheticBackend(SyntheticDetectorConfig synth, BackendConfig config)
      : DetectorBackend(std::move(config)), synth_(synth) {
    synth_.validate();
  }

  const SyntheticDetectorConfig& synthetic_config() const { return synth_; }

 private:
  DetectorOutput detect_impl(const ImageRecord& image) const override {
    return synthetic_detect(synth_, image);
  }

  SyntheticDetectorConfig synth_;
};

/// Check the shared-draw dominance preconditions for a fast/slow pair: same
/// seed and slope, slow at least as strong on every face, fewer spurious
/// boxes, tighter localization. Returns false when any condition fails.
inline bool is_dominant_pair(const SyntheticDetectorConfig& fast,
                             const SyntheticDetectorConfig& slow) {
  return slow.seed == fast.seed && slow.quality >= fast.quality &&
         slow.size_midpoint <= fast.size_midpoint &&
         slow.size_slope == fast.size_slope &&
         slow.false_positive_rate <= fast.false_positive_rate &&
         slow.localization_noise <= fast.localization_noise;
}

}  // namespace detsplit
