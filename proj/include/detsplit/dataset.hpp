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
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "detsplit/errors.hpp"
#include "detsplit/geometry.hpp"

namespace detsplit {

/// Labeled face. Ellipse annotations are converted to tight boxes at ingest,
/// tagged so the provenance stays visible.
struct GroundTruthFace {
  enum class Source { kRectangle, kConvertedEllipse };

  BoundingBox box;
  Source source = Source::kRectangle;
};

/// One test image: unique id, pixel extent, and its ground-truth faces. No
/// pixel data is ever read; the framework operates on annotations alone.
struct ImageRecord {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<GroundTruthFace> faces;
};

/// An annotated image collection with deterministic (lexicographic by id)
/// iteration order.
struct Dataset {
  std::string name;
  std::vector<ImageRecord> images;  // sorted by id

  const ImageRecord* find(std::string_view id) const {
    auto it = std::lower_bound(
        images.begin(), images.end(), id,
        [](const ImageRecord& r, std::string_view key) { return r.id < key; });
    if (it == images.end() || it->id != id) return nullptr;
    return &*it;
  }

  std::size_t total_faces() const {
    std::size_t n = 0;
    for (const auto& img : images) n += img.faces.size();
    return n;
  }
};

enum class DatasetFormat { kJsonl, kFddbEllipse };

/// Side-length ratio of a ground-truth or detected box relative to its image.
inline double relative_face_size(const BoundingBox& box,
                                 const ImageRecord& image) {
  return relative_size(box, image.width, image.height);
}

namespace detail {

inline void clamp_faces_or_throw(ImageRecord& image) {
  for (auto& face : image.faces) {
    face.box = clamp_to_extent(face.box, image.width, image.height);
    if (!face.box.valid()) {
      throw InputError("image '" + image.id +
                       "': face box has zero area after clamping to image "
                       "extent");
    }
  }
}

inline void sort_and_check_ids(Dataset& dataset) {
  std::sort(dataset.images.begin(), dataset.images.end(),
            [](const ImageRecord& a, const ImageRecord& b) {
              return a.id < b.id;
            });
  for (std::size_t i = 1; i < dataset.images.size(); ++i) {
    if (dataset.images[i].id == dataset.images[i - 1].id) {
      throw InputError("duplicate image id '" + dataset.images[i].id + "'");
    }
  }
}

inline Dataset parse_jsonl_dataset(std::istream& in, std::string name) {
  Dataset dataset;
  dataset.name = std::move(name);
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
    ImageRecord image;
    try {
      image.id = obj.at("id").get<std::string>();
      image.width = obj.at("width").get<int>();
      image.height = obj.at("height").get<int>();
      for (const auto& arr : obj.value("faces", nlohmann::json::array())) {
        if (!arr.is_array() || arr.size() != 4) {
          throw InputError("face entry must be [x_min,y_min,x_max,y_max]");
        }
        GroundTruthFace face;
        face.box = {arr[0].get<double>(), arr[1].get<double>(),
                    arr[2].get<double>(), arr[3].get<double>()};
        face.source = GroundTruthFace::Source::kRectangle;
        image.faces.push_back(face);
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (image.id.empty()) {
      throw InputError("line " + std::to_string(line_no) + ": empty image id");
    }
    if (image.width <= 0 || image.height <= 0) {
      throw InputError("line " + std::to_string(line_no) + ": image '" +
                       image.id + "' has non-positive dimensions");
    }
    clamp_faces_or_throw(image);
    dataset.images.push_back(std::move(image));
  }
  sort_and_check_ids(dataset);
  return dataset;
}

// FDDB annotation blocks: image id line, face count line, then one ellipse
// per line as "semi_major semi_minor angle center_x center_y [label]".
// The format carries no image dimensions, so the extent is inferred as the
// hull of the converted boxes (rounded up, minimum 1x1).
inline Dataset parse_fddb_dataset(std::istream& in, std::string name) {
  Dataset dataset;
  dataset.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;

  auto next_content_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
        line.pop_back();
      }
      if (line.find_first_not_of(" \t") != std::string::npos) {
        out = line;
        return true;
      }
    }
    return false;
  };

  std::string content;
  while (next_content_line(content)) {
    ImageRecord image;
    image.id = content;

    if (!next_content_line(content)) {
      throw InputError("line " + std::to_string(line_no) +
                       ": missing face count for image '" + image.id + "'");
    }
    long count = 0;
    try {
      std::size_t pos = 0;
      count = std::stol(content, &pos);
      if (pos != content.size() || count < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(line_no) +
                       ": invalid face count '" + content + "'");
    }

    for (long i = 0; i < count; ++i) {
      if (!next_content_line(content)) {
        throw InputError("line " + std::to_string(line_no) +
                         ": unexpected end of input inside image '" +
                         image.id + "'");
      }
      std::istringstream fields(content);
      double values[5];
      if (!(fields >> values[0] >> values[1] >> values[2] >> values[3] >>
            values[4])) {
        throw InputError("line " + std::to_string(line_no) +
                         ": malformed ellipse line");
      }
      std::string trailing;
      fields >> trailing;  // optional detection-score column, ignored
      EllipseAnnotation ellipse{values[3], values[4], values[0], values[1],
                                values[2]};
      if (!ellipse.valid()) {
        throw InputError("line " + std::to_string(line_no) +
                         ": invalid ellipse (requires semi_major >= "
                         "semi_minor > 0)");
      }
      GroundTruthFace face;
      face.box = ellipse_to_box(ellipse);
      face.box.x_min = std::max(face.box.x_min, 0.0);
      face.box.y_min = std::max(face.box.y_min, 0.0);
      face.source = GroundTruthFace::Source::kConvertedEllipse;
      image.faces.push_back(face);
    }

    double max_x = 1.0;
    double max_y = 1.0;
    for (const auto& face : image.faces) {
      max_x = std::max(max_x, face.box.x_max);
      max_y = std::max(max_y, face.box.y_max);
    }
    image.width = static_cast<int>(std::ceil(max_x));
    image.height = static_cast<int>(std::ceil(max_y));
    clamp_faces_or_throw(image);
    dataset.images.push_back(std::move(image));
  }
  sort_and_check_ids(dataset);
  return dataset;
}

}  // namespace detail

/// Parse an annotation stream into a Dataset. Out-of-bounds boxes are
/// clamped to the image extent; a box with zero area after clamping, a
/// malformed line, or a duplicate image id raise InputError.
inline Dataset parse_dataset(std::istream& in, DatasetFormat format,
                             std::string name = "") {
  switch (format) {
    case DatasetFormat::kJsonl:
      return detail::parse_jsonl_dataset(in, std::move(name));
    case DatasetFormat::kFddbEllipse:
      return detail::parse_fddb_dataset(in, std::move(name));
  }
  throw ConfigError("unknown dataset format");
}

/// Serialize to the jsonl dataset format; parse_dataset(serialize(d)) is the
/// identity up to float formatting (doubles round-trip exactly).
inline std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& image : dataset.images) {
    nlohmann::json faces = nlohmann::json::array();
    for (const auto& face : image.faces) {
      faces.push_back({face.box.x_min, face.box.y_min, face.box.x_max,
                       face.box.y_max});
    }
    nlohmann::json obj{{"id", image.id},
                       {"width", image.width},
                       {"height", image.height},
                       {"faces", std::move(faces)}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace detsplit
