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

// Instance segmentation by merging adjacent super points that share a label
// and an inclusion pattern over all detections, and mAP at IoU 0.5.

#ifndef LIFTSEG_INSTANCE_H_
#define LIFTSEG_INSTANCE_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liftseg/detect.h"
#include "liftseg/geom.h"
#include "liftseg/vote.h"

namespace liftseg::instance {

inline constexpr double kDefaultInclusionThreshold = 0.5;
inline constexpr double kMatchIou = 0.5;

// Symmetric, irreflexive super-point adjacency; neighbor lists are sorted.
struct Adjacency {
  std::vector<std::vector<int>> neighbors;

  int num_superpoints() const { return static_cast<int>(neighbors.size()); }
  bool adjacent(int a, int b) const;
  std::vector<std::pair<int, int>> Edges() const;  // a < b, lexicographic
};

// A and B are adjacent iff some pair of their points is closer than radius.
// Throws liftseg::Error unless radius > 0.
Adjacency SuperpointAdjacency(const geom::PointCloud& cloud,
                              const geom::SuperPointPartition& partition, double radius);

// Twice the mean nearest-neighbor distance; 1 for a single-point cloud.
double DefaultAdjacencyRadius(const geom::PointCloud& cloud);

// S x B entries: super point i is included in detection b (kIncluded) when at
// least `threshold` of its points visible in b's view are members of b. A
// super point with no visible point in that view is kUndetermined.
inline constexpr std::uint8_t kExcluded = 0;
inline constexpr std::uint8_t kIncluded = 1;
inline constexpr std::uint8_t kUndetermined = 2;
using InclusionPatterns = std::vector<std::vector<std::uint8_t>>;
InclusionPatterns ComputeInclusion(const vote::VoteInputs& in,
                                   double threshold = kDefaultInclusionThreshold);

// Marks entries undetermined where the detection's label differs from the
// super point's label, so only same-label detections can split a part.
void RestrictToOwnLabel(const detect::DetectionSet& detections,
                        std::span<const int> superpoint_labels, InclusionPatterns* patterns);

struct InstanceSegmentation {
  std::vector<int> superpoint_instance;  // -1 for null super points
  std::vector<int> instance_labels;
  std::vector<double> instance_scores;

  int num_instances() const { return static_cast<int>(instance_labels.size()); }
  std::vector<int> PointInstances(const geom::SuperPointPartition& partition) const;
};

// True when no detection has one super point included and the other excluded.
bool CompatiblePatterns(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Connected components over the given edges restricted to pairs with equal
// non-null labels and compatible inclusion patterns. Instance ids follow the
// smallest super-point index of each component. Scores are left at zero.
InstanceSegmentation MergeInstances(std::span<const int> superpoint_labels,
                                    std::span<const std::pair<int, int>> edges,
                                    const InclusionPatterns& patterns);
InstanceSegmentation MergeInstances(std::span<const int> superpoint_labels,
                                    const Adjacency& adjacency,
                                    const InclusionPatterns& patterns);

// Mean of the members' scores in their assigned label column.
void AssignScores(const vote::ScoreMatrix& scores, InstanceSegmentation* seg);

struct InstanceMask {
  int label = 0;
  double score = 1.0;
  std::vector<int> points;  // sorted
};

// Groups points by instance id; ids must be contiguous from 0.
std::vector<InstanceMask> MasksFromPoints(std::span<const int> point_instance,
                                          std::span<const int> point_label,
                                          std::span<const double> scores);

double MaskIou(std::span<const int> a, std::span<const int> b);

// One prediction or ground-truth instance tagged with its object.
struct Tagged {
  int object = 0;
  const InstanceMask* mask = nullptr;
};

// All-point interpolated AP of predictions ranked by score (stable in input
// order), each greedily matched to the unmatched ground truth of its object
// with the highest IoU >= kMatchIou. Returns nullopt without ground truth.
std::optional<double> AveragePrecision(std::span<const Tagged> predictions,
                                       std::span<const Tagged> ground_truth);

struct InstanceObject {
  std::string category;
  std::vector<std::string> label_names;
  std::vector<InstanceMask> ground_truth;
  std::vector<InstanceMask> predicted;
};

struct CategoryAp {
  std::string name;
  std::vector<std::string> parts;
  std::vector<std::optional<double>> part_ap;  // nullopt: no ground truth
  std::optional<double> part_aware;  // nullopt: no part has ground truth
  std::optional<double> part_agnostic;
  int num_objects = 0;
};

struct ApResult {
  std::vector<CategoryAp> categories;  // sorted by name
  double part_aware_mean = 0.0;
  double part_agnostic_mean = 0.0;
};

// Part-aware: AP per part over a category's objects, averaged over parts with
// ground truth, then over categories. Part-agnostic: labels ignored, AP per
// category, then averaged. Categories without ground truth are skipped.
ApResult EvaluateInstances(std::span<const InstanceObject> objects);
std::string ToJson(const ApResult& result);

// Text format: "#instance <id> <label> <score>" headers, then one line per
// point "point_idx instance_id label_id" (-1 -1 outside every instance).
struct InstanceFile {
  std::vector<int> point_instance;
  std::vector<int> point_label;
  std::vector<double> scores;
  std::vector<int> labels;

  std::vector<InstanceMask> Masks() const;
};
void WriteInstances(const std::string& path, const InstanceFile& file);
InstanceFile ReadInstances(const std::string& path, std::size_t num_points);
InstanceFile ToFile(const InstanceSegmentation& seg, const geom::SuperPointPartition& partition);

}  // namespace liftseg::instance

#endif  // LIFTSEG_INSTANCE_H_
