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
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/difficulty.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/rng.hpp"
#include "detsplit/synthetic.hpp"

namespace detsplit {

/// Everything needed to reproduce one synthetic benchmark: images with
/// ground truth, the two simulated detector configurations, and two external
/// difficulty-score tables of different fidelity.
struct SynthBenchmark {
  Dataset dataset;
  SyntheticDetectorConfig fast_config;
  SyntheticDetectorConfig slow_config;
  ScoreTable class_agnostic;
  ScoreTable person_aware;
};

/// Fast-pass profile: misses small faces, hallucinates often, sloppy boxes.
/// Its recall gap against the slow profile is concentrated in the small-size
/// tail (steep logistic, low midpoint) rather than size-independent, so
/// per-image difficulty stays predictable from observable features while the
/// detection count still tracks the true face count.
inline SyntheticDetectorConfig default_fast_config() {
  SyntheticDetectorConfig cfg;
  cfg.quality = 0.93;
  cfg.size_midpoint = 0.05;
  cfg.size_slope = 40.0;
  cfg.false_positive_rate = 0.15;
  cfg.localization_noise = 0.10;
  cfg.tp_confidence_floor = 0.50;
  cfg.fp_confidence_ceiling = 0.45;
  return cfg;
}

/// Slow-pass profile: near-saturated recall, rare hallucinations, tight
/// boxes. Shares the fast profile's size slope so the miss probability is
/// pointwise lower at every face size.
inline SyntheticDetectorConfig default_slow_config() {
  SyntheticDetectorConfig cfg;
  cfg.quality = 0.995;
  cfg.size_midpoint = 0.02;
  cfg.size_slope = 40.0;
  cfg.false_positive_rate = 0.03;
  cfg.localization_noise = 0.03;
  cfg.tp_confidence_floor = 0.55;
  cfg.fp_confidence_ceiling = 0.40;
  return cfg;
}

/// Benchmark generator knobs. Face counts are 1 + Poisson(mean) where the
/// mean is face_count_mean for ordinary images and crowd_count_mean for a
/// crowd_fraction minority, giving the overdispersed counts real datasets
/// show. Face sizes are log-normal in relative units, clamped to
/// [min_rel_size, max_rel_size]; the log-size mean drops by
/// crowding_exponent * ln(face count), so crowded images have systematically
/// smaller faces the way real group shots do. Both forms of coupling are
/// what make detector-based difficulty criteria informative.
struct SynthBenchConfig {
  std::size_t num_images = 500;
  int image_width = 640;
  int image_height = 640;
  double face_count_mean = 0.8;
  double crowd_fraction = 0.15;
  double crowd_count_mean = 8.0;
  double log_size_mean = -2.2;
  double log_size_sd = 0.45;
  double crowding_exponent = 0.45;
  double min_rel_size = 0.02;
  double max_rel_size = 0.5;
  std::uint64_t master_seed = 1;
  // With shared draws both detectors consume identical event streams, so the
  // slow detector finds a superset of the fast detector's true faces and a
  // prefix-subset of its hallucinations.
  bool shared_draws = true;
  SyntheticDetectorConfig fast = default_fast_config();
  SyntheticDetectorConfig slow = default_slow_config();
  // Noise amplitude added to the two score tables; the person-aware table is
  // the sharper predictor.
  double class_agnostic_noise = 0.35;
  double person_aware_noise = 0.10;

  void validate() const {
    if (num_images == 0) throw ConfigError("num_images must be positive");
    if (image_width <= 0 || image_height <= 0) {
      throw ConfigError("image dimensions must be positive");
    }
    if (face_count_mean < 0.0 || crowd_count_mean < 0.0) {
      throw ConfigError("face count means must be non-negative");
    }
    if (crowd_fraction < 0.0 || crowd_fraction > 1.0) {
      throw ConfigError("crowd_fraction must be in [0,1]");
    }
    if (!(min_rel_size > 0.0) || min_rel_size > max_rel_size ||
        max_rel_size > 1.0) {
      throw ConfigError("need 0 < min_rel_size <= max_rel_size <= 1");
    }
    if (log_size_sd < 0.0) throw ConfigError("log_size_sd must be >= 0");
    if (crowding_exponent < 0.0) {
      throw ConfigError("crowding_exponent must be >= 0");
    }
    if (class_agnostic_noise < 0.0 || person_aware_noise < 0.0) {
      throw ConfigError("score-table noise must be non-negative");
    }
    fast.validate();
    slow.validate();
  }
};

/// Zero-padded image id, stable across platforms.
inline std::string make_image_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img%05zu", index);
  return buf;
}

/// External difficulty score: expected number of faces the fast profile
/// would miss, plus bounded symmetric noise so the table is an imperfect
/// predictor. Higher means harder, matching the criterion orientation.
inline ScoreTable difficulty_score_table(const Dataset& dataset,
                                         const SyntheticDetectorConfig& fast,
                                         double noise_amplitude,
                                         std::uint64_t seed,
                                         std::string_view tag) {
  ScoreTable table;
  for (const auto& image : dataset.images) {
    double expected_misses = 0.0;
    for (const auto& face : image.faces) {
      const double s = relative_face_size(face.box, image);
      expected_misses += 1.0 - detect_probability(fast, s);
    }
    RandomStream noise(seed, image.id, Draw::kScoreNoise, hash_str(tag));
    table.insert(image.id, expected_misses + noise_amplitude * noise.symmetric());
  }
  return table;
}

/// Build the whole benchmark from one master seed. The dataset depends only
/// on the master seed; detector seeds are overridden so the fast profile
/// always uses the master seed and the slow profile either shares it
/// (dominant pair) or mixes it into an independent stream.
inline SynthBenchmark generate_benchmark(const SynthBenchConfig& config) {
  config.validate();

  SynthBenchmark bench;
  bench.dataset.name = "synth";
  bench.fast_config = config.fast;
  bench.slow_config = config.slow;
  bench.fast_config.seed = config.master_seed;
  bench.slow_config.seed = config.shared_draws
                               ? config.master_seed
                               : mix64(config.master_seed + 1);

  const double w = static_cast<double>(config.image_width);
  const double h = static_cast<double>(config.image_height);
  const double scale = std::sqrt(w * h);
  const double max_side = std::min(w, h);

  for (std::size_t idx = 0; idx < config.num_images; ++idx) {
    ImageRecord image;
    image.id = make_image_id(idx);
    image.width = config.image_width;
    image.height = config.image_height;

    RandomStream count_stream(config.master_seed, image.id, Draw::kFaceCount);
    const bool crowd = count_stream.uniform() < config.crowd_fraction;
    const double count_mean =
        crowd ? config.crowd_count_mean : config.face_count_mean;
    const std::size_t num_faces =
        1 + poisson_from_uniform(count_mean, count_stream.uniform());
    const double crowded_mean =
        config.log_size_mean -
        config.crowding_exponent * std::log(static_cast<double>(num_faces));

    for (std::size_t i = 0; i < num_faces; ++i) {
      RandomStream size_stream(config.master_seed, image.id, Draw::kFaceSize,
                               i);
      const double z =
          normal_from_uniforms(size_stream.uniform(), size_stream.uniform());
      const double rel =
          std::clamp(std::exp(crowded_mean + config.log_size_sd * z),
                     config.min_rel_size, config.max_rel_size);
      const double side = std::min(rel * scale, max_side);

      RandomStream place_stream(config.master_seed, image.id,
                                Draw::kFacePlacement, i);
      const double x0 = place_stream.uniform() * (w - side);
      const double y0 = place_stream.uniform() * (h - side);
      image.faces.push_back(
          {BoundingBox{x0, y0, x0 + side, y0 + side},
           GroundTruthFace::Source::kRectangle});
    }
    bench.dataset.images.push_back(std::move(image));
  }

  bench.class_agnostic =
      difficulty_score_table(bench.dataset, bench.fast_config,
                             config.class_agnostic_noise, config.master_seed,
                             "class_agnostic");
  bench.person_aware =
      difficulty_score_table(bench.dataset, bench.fast_config,
                             config.person_aware_noise, config.master_seed,
                             "person_aware");
  return bench;
}

/// Backend wrappers around the benchmark's two profiles. Confidence
/// filtering is disabled; the synthetic confidences are already calibrated.
inline SyntheticBackend make_fast_backend(const SynthBenchmark& bench) {
  return SyntheticBackend(bench.fast_config,
                          BackendConfig{"fast-synth", 0.0, 0.0});
}

inline SyntheticBackend make_slow_backend(const SynthBenchmark& bench) {
  return SyntheticBackend(bench.slow_config,
                          BackendConfig{"slow-synth", 0.0, 0.0});
}

}  // namespace detsplit
