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

// Per-object segmentation objectives: exact and relaxed mIoU, their analytic
// gradients, cross-entropy, and lifting super-point scores to points.
//
// Label convention: a label absent from both ground truth and prediction
// scores IoU 1; absent from exactly one side it scores 0. Union
// denominators are clamped below at kUnionEpsilon.

#ifndef LIFTSEG_LOSS_H_
#define LIFTSEG_LOSS_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "liftseg/geom.h"

namespace liftseg::loss {

inline constexpr double kUnionEpsilon = 1e-12;
inline constexpr double kProbabilityFloor = 1e-12;

struct GroundTruth {
  std::vector<int> point_labels;  // -1 = null
  int num_labels = 0;

  std::size_t num_points() const { return point_labels.size(); }
};

// L x N matrix; row j is the (soft) indicator of label j over points.
using SoftPrediction = Eigen::MatrixXd;

// l^_j = M s_j: every point takes its super point's score. `scores` is S x L.
SoftPrediction LiftScores(const geom::SuperPointPartition& partition,
                          const Eigen::Ref<const Eigen::MatrixXd>& scores);
// Transpose of LiftScores: sums a point gradient (L x N) per super point.
Eigen::MatrixXd LiftScoresBackward(const geom::SuperPointPartition& partition,
                                   const Eigen::Ref<const Eigen::MatrixXd>& grad);

// Binary indicators of a hard labeling (-1 entries select no row).
SoftPrediction OneHot(std::span<const int> point_labels, int num_labels);

std::vector<double> PerLabelIou(const GroundTruth& gt, const SoftPrediction& pred);
double Miou(const GroundTruth& gt, const SoftPrediction& pred);
double Miou(const GroundTruth& gt, std::span<const int> predicted_labels);

double MriouLoss(const GroundTruth& gt, const SoftPrediction& pred);
// d MriouLoss / d pred, L x N.
SoftPrediction MriouGrad(const GroundTruth& gt, const SoftPrediction& pred);

struct CrossEntropyResult {
  double value = 0.0;
  std::size_t clamped = 0;  // points whose true-class probability hit the floor
};

// `probs` is N x (L+1), column L the null class. Ground-truth null points use
// the null class.
CrossEntropyResult CrossEntropyLoss(const GroundTruth& gt,
                                    const Eigen::Ref<const Eigen::MatrixXd>& probs);
Eigen::MatrixXd CrossEntropyGrad(const GroundTruth& gt,
                                 const Eigen::Ref<const Eigen::MatrixXd>& probs);

}  // namespace liftseg::loss

#endif  // LIFTSEG_LOSS_H_
