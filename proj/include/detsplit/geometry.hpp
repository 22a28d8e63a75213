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
#include <compare>

namespace detsplit {

/// Axis-aligned box in continuous pixel coordinates. Valid boxes have
/// strictly positive area.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min < x_max && y_min < y_max; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  // Lexicographic (x_min, y_min, x_max, y_max); the deterministic box order
  // used for confidence tie-breaking.
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

/// Rotated ellipse annotation (FDDB-style ground truth). Semi-axes in
/// pixels, angle in radians; semi_major >= semi_minor > 0.
struct EllipseAnnotation {
  double center_x = 0.0;
  double center_y = 0.0;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;

  bool valid() const { return semi_major >= semi_minor && semi_minor > 0.0; }
};

/// Tight axis-aligned bounding box of a rotated ellipse: the extent along
/// each axis is sqrt(a^2 cos^2(t) + b^2 sin^2(t)) and the transpose.
inline BoundingBox ellipse_to_box(const EllipseAnnotation& e) {
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double a2 = e.semi_major * e.semi_major;
  const double b2 = e.semi_minor * e.semi_minor;
  const double half_w = std::sqrt(a2 * c * c + b2 * s * s);
  const double half_h = std::sqrt(a2 * s * s + b2 * c * c);
  return {e.center_x - half_w, e.center_y - half_h, e.center_x + half_w,
          e.center_y + half_h};
}

/// Intersection over union of two boxes; 0 when disjoint.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

/// Clamp a box to the [0,width] x [0,height] extent. May produce a
/// zero-area box when the input lies entirely outside.
inline BoundingBox clamp_to_extent(const BoundingBox& b, double width,
                                   double height) {
  return {std::clamp(b.x_min, 0.0, width), std::clamp(b.y_min, 0.0, height),
          std::clamp(b.x_max, 0.0, width), std::clamp(b.y_max, 0.0, height)};
}

/// Scale-invariant size of a box relative to an image: the side-length
/// ratio sqrt(box area / image area). 1.0 for a box covering the image.
inline double relative_size(const BoundingBox& box, double image_width,
                            double image_height) {
  return std::sqrt(box.area() / (image_width * image_height));
}

}  // namespace detsplit
