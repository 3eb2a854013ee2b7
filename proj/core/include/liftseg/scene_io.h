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

// On-disk formats for scenes, camera sets and visibility maps.
//
// Cloud file (text):
//   #liftseg-cloud v1 N=<n> S=<s> L=<labels>
//   x y z superpoint_id gt_label_id        (one line per point, -1 = null)
// Label sidecar (JSON): {"labels": ["arm", ...], "category": "Chair"}
// Cameras (JSON): {"version": 1, "splat_radius_px": r, "depth_epsilon": e,
//                  "cameras": [{"direction": [x,y,z], "distance": d,
//                               "width": w, "height": h, "fov_y": f}, ...]}
// Visibility (text):
//   #liftseg-visibility v1 K=<k> N=<n>
//   one line of N '0'/'1' characters per view

#ifndef LIFTSEG_SCENE_IO_H_
#define LIFTSEG_SCENE_IO_H_

#include <string>
#include <vector>

#include "liftseg/geom.h"

namespace liftseg::geom {

struct Scene {
  PointCloud cloud;
  SuperPointPartition partition;
  std::vector<int> gt_labels;  // per point, -1 = null
  std::vector<std::string> label_names;
  std::string category = "default";

  int num_labels() const { return static_cast<int>(label_names.size()); }
  bool operator==(const Scene& other) const = default;
};

struct LabelTable {
  std::vector<std::string> labels;
  std::string category = "default";
};

// Checks that partition and labels cover the cloud and labels are in range.
void ValidateScene(const Scene& scene);

void WriteCloudFile(const std::string& path, const Scene& scene);
// Label names are filled from the header's L as "label<j>"; pair with
// ReadLabelTable for real names.
Scene ReadCloudFile(const std::string& path);

void WriteLabelTable(const std::string& path, const LabelTable& table);
LabelTable ReadLabelTable(const std::string& path);

Scene LoadScene(const std::string& cloud_path, const std::string& labels_path);
void SaveScene(const Scene& scene, const std::string& cloud_path,
               const std::string& labels_path);

struct ViewSet {
  std::vector<Camera> cameras;
  VisibilityOptions options;
  bool operator==(const ViewSet& other) const {
    return cameras == other.cameras &&
           options.splat_radius_px == other.options.splat_radius_px &&
           options.depth_epsilon == other.options.depth_epsilon;
  }
};

void WriteViewSet(const std::string& path, const ViewSet& views);
ViewSet ReadViewSet(const std::string& path);

void WriteVisibility(const std::string& path, const VisibilityMap& map);
VisibilityMap ReadVisibility(const std::string& path);

}  // namespace liftseg::geom

#endif  // LIFTSEG_SCENE_IO_H_
