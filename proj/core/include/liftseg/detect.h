// Copyright 2026 The liftseg Authors. All Rights Reserved.
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

// Per-view 2D detections (boxes with optional masks) and the point-to-
// detection membership they induce on a point cloud.

#ifndef LIFTSEG_DETECT_H_
#define LIFTSEG_DETECT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liftseg/geom.h"

namespace liftseg::detect {

// Half-open pixel box [x0, x1) x [y0, y1).
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool Contains(double x, double y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
  bool operator==(const Box& other) const = default;
};

// Pixels touched by a box: [floor(x0), ceil(x1)) x [floor(y0), ceil(y1)).
struct PixelWindow {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};
PixelWindow CropWindow(const Box& box);

// Binary foreground mask stored over the crop window of its box.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, std::vector<std::uint8_t> bits);
  static Mask FromRle(int width, int height, std::span<const int> runs);

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int col, int row) const {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::vector<int> ToRle() const;
  std::size_t CountSet() const;

  bool operator==(const Mask& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Detection {
  int view = 0;
  int label = 0;
  Box box;
  std::optional<Mask> mask;
  std::vector<float> feature;
  float confidence = 1.0f;

  bool operator==(const Detection& other) const = default;
};

struct DetectionSet {
  int num_views = 0;
  int num_labels = 0;
  int feature_dim = 0;
  std::vector<std::string> labels;
  int image_width = geom::Camera::kDefaultResolution;
  int image_height = geom::Camera::kDefaultResolution;
  std::vector<Detection> detections;

  std::size_t size() const { return detections.size(); }
  // Throws liftseg::Error naming the offending detection.
  void Validate() const;

  bool operator==(const DetectionSet& other) const = default;
};

enum class MembershipMode { kBox, kMask };

// Sparse I_b(p): for every detection, the sorted indices of its member points.
class MembershipTensor {
 public:
  MembershipTensor() = default;
  MembershipTensor(std::size_t num_points, std::vector<std::vector<int>> members);

  std::size_t num_detections() const { return members_.size(); }
  std::size_t num_points() const { return num_points_; }
  std::span<const int> members(std::size_t detection) const {
    return members_[detection];
  }
  bool contains(std::size_t detection, int point) const;

  bool operator==(const MembershipTensor& other) const = default;

 private:
  std::size_t num_points_ = 0;
  std::vector<std::vector<int>> members_;
};

// A point belongs to a detection when its continuous projection in the
// detection's view falls inside the box and, in mask mode, the pixel under it
// is set in the mask.
MembershipTensor ComputeMembership(const geom::PointCloud& cloud,
                                   std::span<const geom::Camera> cameras,
                                   const DetectionSet& detections,
                                   MembershipMode mode, int threads = 1);

// JSON detection file:
// {"version": 1, "K": .., "L": .., "D": .., "labels": [..],
//  "width": .., "height": ..,
//  "detections": [{"k": .., "j": .., "box": [x0, y0, x1, y1], "conf": ..,
//                  "feature": [..], "mask_rle": {"w", "h", "runs"} | null}]}
DetectionSet LoadDetections(const std::string& path);
void SaveDetections(const DetectionSet& set, const std::string& path);

}  // namespace liftseg::detect

#endif  // LIFTSEG_DETECT_H_
