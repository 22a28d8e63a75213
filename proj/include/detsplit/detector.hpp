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
#include <atomic>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "detsplit/dataset.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/geometry.hpp"

namespace detsplit {

/// One predicted box with its confidence score in [0,1].
struct Detection {
  BoundingBox box;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Result of querying a backend on one image. Detections are ordered by
/// descending confidence (ties by lexicographic box order) and all lie at or
/// above the backend's confidence threshold.
struct DetectorOutput {
  std::string image_id;
  std::vector<Detection> detections;
  double latency_model_s = 0.0;
};

/// Static description of a backend: display name, confidence threshold
/// applied to its raw detections, and its modeled per-image latency.
struct BackendConfig {
  std::string name;
  double confidence_threshold = 0.5;
  double per_image_latency_s = 0.0;

  void validate() const {
    if (confidence_threshold < 0.0 || confidence_threshold > 1.0) {
      throw ConfigError("backend '" + name +
                        "': confidence_threshold must be in [0,1]");
    }
    if (per_image_latency_s < 0.0) {
      throw ConfigError("backend '" + name +
                        "': per_image_latency_s must be >= 0");
    }
  }
};

inline void sort_by_confidence(std::vector<Detection>& detections) {
  std::sort(detections.begin(), detections.end(),
            [](const Detection& a, const Detection& b) {
              if (a.confidence != b.confidence)
                return a.confidence > b.confidence;
              return a.box < b.box;
            });
}

/// Black-box detector. Backends are read-only after construction and safe to
/// query concurrently; the invocation counter exists so tests and the batch
/// router can account for backend calls.
class DetectorBackend {
 public:
  explicit DetectorBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
  }
  virtual ~DetectorBackend() = default;

  DetectorBackend(const DetectorBackend&) = delete;
  DetectorBackend& operator=(const DetectorBackend&) = delete;

  /// Query the backend. Deterministic for a fixed backend and image; output
  /// is threshold-filtered and confidence-sorted.
  DetectorOutput detect(const ImageRecord& image) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    DetectorOutput out = detect_impl(image);
    out.image_id = image.id;
    out.latency_model_s = config_.per_image_latency_s;
    std::erase_if(out.detections, [&](const Detection& d) {
      return d.confidence < config_.confidence_threshold;
    });
    sort_by_confidence(out.detections);
    return out;
  }

  const BackendConfig& config() const { return config_; }

  std::uint64_t call_count() const {
    return calls_.load(std::memory_order_relaxed);
  }
  void reset_call_count() const {
    calls_.store(0, std::memory_order_relaxed);
  }

 private:
  virtual DetectorOutput detect_impl(const ImageRecord& image) const = 0;

  BackendConfig config_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// Backend serving detections loaded from a file, mirroring externally
/// produced model outputs. Querying an id absent from the file is an error.
class PrecomputedBackend final : public DetectorBackend {
 public:
  PrecomputedBackend(std::map<std::string, std::vector<Detection>> detections,
                     BackendConfig config)
      : DetectorBackend(std::move(config)),
        detections_(std::move(detections)) {}

  bool has_image(const std::string& id) const {
    return detections_.contains(id);
  }

 private:
  DetectorOutput detect_impl(const ImageRecord& image) const override {
    auto it = detections_.find(image.id);
    if (it == detections_.end()) {
      throw InputError("backend '" + config().name +
                       "': no stored detections for image id '" + image.id +
                       "'");
    }
    DetectorOutput out;
    out.detections = it->second;
    return out;
  }

  std::map<std::string, std::vector<Detection>> detections_;
};

/// Parse the jsonl detections format:
///   {"id": str, "detections": [[x_min,y_min,x_max,y_max,confidence], ...]}
/// one object per line, ids unique across the file.
inline std::map<std::string, std::vector<Detection>> parse_detections(
    std::istream& in) {
  std::map<std::string, std::vector<Detection>> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(line_no) +
                       ": invalid JSON: " + e.what());
    }
    std::string id;
    std::vector<Detection> detections;
    try {
      id = obj.at("id").get<std::string>();
      for (const auto& arr : obj.value("detections", nlohmann::json::array())) {
        if (!arr.is_array() || arr.size() != 5) {
          throw InputError(
              "detection entry must be [x_min,y_min,x_max,y_max,confidence]");
        }
        Detection d;
        d.box = {arr[0].get<double>(), arr[1].get<double>(),
                 arr[2].get<double>(), arr[3].get<double>()};
        d.confidence = arr[4].get<double>();
        detections.push_back(d);
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    for (const auto& d : detections) {
      if (d.confidence < 0.0 || d.confidence > 1.0) {
        throw InputError("line " + std::to_string(line_no) + ": image '" + id +
                         "': confidence outside [0,1]");
      }
      if (!d.box.valid()) {
        throw InputError("line " + std::to_string(line_no) + ": image '" + id +
                         "': detection box has non-positive area");
      }
    }
    if (!result.emplace(std::move(id), std::move(detections)).second) {
      throw InputError("line " + std::to_string(line_no) +
                       ": duplicate image id in detections file");
    }
  }
  return result;
}

/// Load a precomputed-detections backend from a jsonl stream.
inline PrecomputedBackend load_precomputed(std::istream& in,
                                           BackendConfig config) {
  return PrecomputedBackend(parse_detections(in), std::move(config));
}

/// Serialize per-image detections to the jsonl detections format (full
/// double precision, round-trips exactly).
inline std::string serialize_detections(
    const std::map<std::string, std::vector<Detection>>& detections) {
  std::string out;
  for (const auto& [id, dets] : detections) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : dets) {
      arr.push_back(
          {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max, d.confidence});
    }
    nlohmann::json obj{{"id", id}, {"detections", std::move(arr)}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace detsplit
