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

// Synthetic labeled objects with oracle detections: primitives sampled on
// their surfaces, super points grown inside each part, and per-view boxes,
// masks and features derived from the visible points of each part.
//
// Spec text:
//   seed = 7
//   preset = chair          (optional; parts come from the preset)
//   spurious_rate = 0.3
//   [part]                  (repeatable; replaces the preset's parts)
//   label = seat
//   shape = box             (box | sphere | cylinder)
//   center = 0 0 0
//   size = 0.5 0.5 0.06     (box: half extents; sphere: radius;
//                            cylinder: radius, half height along z)
//   yaw = 0                 (degrees about z)
//   points = 400

#ifndef LIFTSEG_SYNTH_H_
#define LIFTSEG_SYNTH_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "liftseg/detect.h"
#include "liftseg/geom.h"
#include "liftseg/scene_io.h"

namespace liftseg::synth {

enum class Shape { kBox, kSphere, kCylinder };
enum class ConfidenceModel { kNormal, kAdversarial };

struct PartSpec {
  std::string label;
  Shape shape = Shape::kBox;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> size{0.5, 0.5, 0.5};
  double yaw_degrees = 0.0;
  int points = 300;
  bool caps = true;  // cylinder end caps

  bool operator==(const PartSpec& other) const = default;
};

struct NoiseSpec {
  double drop_rate = 0.0;
  double spurious_rate = 0.0;
  double jitter_px = 0.0;   // each box side moves by U(-j, j)
  double box_pad_px = 0.0;  // each box side moves outward by this much
  int feature_dim = 8;
  double snr = 4.0;
  ConfidenceModel confidence = ConfidenceModel::kNormal;

  bool operator==(const NoiseSpec& other) const = default;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::string category = "default";
  std::vector<PartSpec> parts;
  NoiseSpec noise;
  int views = 10;
  double distance = geom::Camera::kDefaultDistance;
  int resolution = geom::Camera::kDefaultResolution;
  double splat_radius_px = 0.0;  // 0 picks a radius from the point spacing
  double depth_epsilon = 0.02;
  int superpoint_size = 40;      // target points per super point
  bool cross_boundaries = false; // grow super points across part boundaries
  double size_jitter = 0.0;      // relative per-part size perturbation
  bool masks = true;

  // Throws liftseg::Error on an invalid or infeasible spec.
  void Validate() const;
  bool operator==(const SynthSpec& other) const = default;
};

std::vector<std::string> PresetNames();
// Parts and category of a named preset; other fields keep their defaults.
SynthSpec Preset(const std::string& name);

SynthSpec ParseSynthSpec(const std::string& text, const std::string& source = "<string>");
SynthSpec LoadSynthSpec(const std::string& path);

struct SynthBundle {
  geom::Scene scene;
  geom::ViewSet views;
  geom::VisibilityMap visibility;
  detect::DetectionSet detections;
  std::vector<std::uint8_t> truthful;  // per detection
  std::vector<int> gt_instances;       // per point, one instance per part
  std::uint64_t seed = 0;

  bool operator==(const SynthBundle& other) const = default;
};

// Deterministic in spec (including its seed).
SynthBundle Generate(const SynthSpec& spec);

// Files in `dir`: cloud.txt, labels.json, cameras.json, visibility.txt,
// detections.json, truth.json, instances.txt. Creates `dir` if needed.
void Emit(const SynthBundle& bundle, const std::string& dir);
SynthBundle LoadBundle(const std::string& dir);

// Pixel-aligned box around the given projections: [floor(min), floor(max)+1).
detect::Box TightBox(const std::vector<std::array<double, 2>>& pixels);

}  // namespace liftseg::synth

#endif  // LIFTSEG_SYNTH_H_
