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

// Super-point voting: unweighted and weighted coverage scores, softmax
// normalization with a null logit, and label assignment.

#ifndef LIFTSEG_VOTE_H_
#define LIFTSEG_VOTE_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liftseg/detect.h"
#include "liftseg/geom.h"

namespace liftseg::vote {

inline constexpr int kNullLabel = -1;
inline constexpr double kDefaultNullThreshold = 0.5;

enum class ScoreKind { kRawUnweighted, kRawWeighted, kNormalized };

// S x (L+1) scores; the last column belongs to the null label. For
// kRawUnweighted it holds the null threshold, for kRawWeighted it is zero
// (the null logit is supplied at normalization time).
struct ScoreMatrix {
  Eigen::MatrixXd values;
  ScoreKind kind = ScoreKind::kRawUnweighted;

  int num_superpoints() const { return static_cast<int>(values.rows()); }
  int num_labels() const { return static_cast<int>(values.cols()) - 1; }
};

struct Labeling {
  std::vector<int> superpoint_labels;  // kNullLabel for null
  std::vector<int> point_labels;

  bool operator==(const Labeling& other) const = default;
};

// Everything the scoring rules read, bundled for one object.
struct VoteInputs {
  const geom::SuperPointPartition& partition;
  const geom::VisibilityMap& visibility;
  const detect::MembershipTensor& membership;
  const detect::DetectionSet& detections;
};

// Records, per (view, label, point), which detection supplied the maximum so
// the weighted score can be differentiated with respect to the weights.
struct VoteTape {
  int num_views = 0;
  int num_labels = 0;
  std::size_t num_points = 0;
  std::vector<int> winner;           // [(k * L + j) * N + p], -1 = null box
  std::vector<double> denominators;  // per super point: visible observations

  int WinnerAt(int k, int j, std::size_t p) const {
    return winner[(static_cast<std::size_t>(k) * num_labels + j) * num_points + p];
  }
};

// Fraction of each super point's visible point-view observations covered by
// a detection of label j. Super points never observed score 0.
ScoreMatrix ScoreUnweighted(const VoteInputs& in,
                            double null_threshold = kDefaultNullThreshold);

// Same as ScoreUnweighted with each membership multiplied by the detection's
// weight (max over detections of I_b(p) * W(b)). Weights must be >= 0.
ScoreMatrix ScoreWeighted(const VoteInputs& in, std::span<const double> weights,
                          VoteTape* tape = nullptr);

// d loss / d W(b) given d loss / d s~ (S x L). The max is differentiated
// through the detection recorded in the tape; ties went to the lowest index.
std::vector<double> ScoreWeightedBackward(const VoteInputs& in, const VoteTape& tape,
                                          const Eigen::MatrixXd& grad_scores);

// Row-wise softmax over the L label logits plus the shared null logit.
ScoreMatrix NormalizeScores(const ScoreMatrix& raw, double null_score);

struct SoftmaxGrad {
  Eigen::MatrixXd raw;  // S x L
  double null_score = 0.0;
};
// Backpropagates d loss / d s̄ (S x (L+1)) through NormalizeScores.
SoftmaxGrad NormalizeScoresBackward(const ScoreMatrix& normalized,
                                    const Eigen::MatrixXd& grad_normalized);

// kRawUnweighted: argmax over labels, null when the best score is below
// null_threshold. kNormalized: argmax over labels and null. Ties go to the
// lowest column, labels before null.
Labeling AssignLabels(const ScoreMatrix& scores,
                      const geom::SuperPointPartition& partition,
                      double null_threshold = kDefaultNullThreshold);

// Text export: one line per point "point_idx label_id", -1 for null.
void WriteLabeling(const std::string& path, std::span<const int> point_labels);
std::vector<int> ReadLabeling(const std::string& path, std::size_t num_points);

// TSV export: header of label names plus "null", one row per super point.
void WriteScores(const std::string& path, const ScoreMatrix& scores,
                 std::span<const std::string> label_names);

}  // namespace liftseg::vote

#endif  // LIFTSEG_VOTE_H_
