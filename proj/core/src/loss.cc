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

#include "liftseg/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "liftseg/error.h"

namespace liftseg::loss {
namespace {

void CheckShapes(const GroundTruth& gt, const SoftPrediction& pred) {
  if (pred.rows() != gt.num_labels ||
      pred.cols() != static_cast<Eigen::Index>(gt.num_points())) {
    throw Error("prediction is " + std::to_string(pred.rows()) + "x" +
                std::to_string(pred.cols()) + ", ground truth has L=" +
                std::to_string(gt.num_labels) + " N=" + std::to_string(gt.num_points()));
  }
  for (int l : gt.point_labels) {
    if (l < -1 || l >= gt.num_labels) throw Error("ground-truth label out of range");
  }
}

struct LabelStats {
  double intersection = 0.0;
  double gt_mass = 0.0;
  double pred_mass = 0.0;

  double Union() const { return gt_mass + pred_mass - intersection; }
};

std::vector<LabelStats> Stats(const GroundTruth& gt, const SoftPrediction& pred) {
  std::vector<LabelStats> stats(gt.num_labels);
  for (int j = 0; j < gt.num_labels; ++j) stats[j].pred_mass = pred.row(j).sum();
  for (std::size_t p = 0; p < gt.num_points(); ++p) {
    const int l = gt.point_labels[p];
    if (l < 0) continue;
    stats[l].gt_mass += 1.0;
    stats[l].intersection += pred(l, static_cast<Eigen::Index>(p));
  }
  return stats;
}

}  // namespace

SoftPrediction LiftScores(const geom::SuperPointPartition& partition,
                          const Eigen::Ref<const Eigen::MatrixXd>& scores) {
  if (scores.rows() != partition.num_superpoints()) {
    throw Error("scores have " + std::to_string(scores.rows()) + " rows, partition has " +
                std::to_string(partition.num_superpoints()) + " super points");
  }
  SoftPrediction out(scores.cols(), static_cast<Eigen::Index>(partition.num_points()));
  for (std::size_t p = 0; p < partition.num_points(); ++p) {
    out.col(static_cast<Eigen::Index>(p)) = scores.row(partition.superpoint_of(p)).transpose();
  }
  return out;
}

Eigen::MatrixXd LiftScoresBackward(const geom::SuperPointPartition& partition,
                                   const Eigen::Ref<const Eigen::MatrixXd>& grad) {
  if (grad.cols() != static_cast<Eigen::Index>(partition.num_points())) {
    throw Error("point gradient does not match the partition");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(partition.num_superpoints(), grad.rows());
  for (std::size_t p = 0; p < partition.num_points(); ++p) {
    out.row(partition.superpoint_of(p)) += grad.col(static_cast<Eigen::Index>(p)).transpose();
  }
  return out;
}

SoftPrediction OneHot(std::span<const int> point_labels, int num_labels) {
  SoftPrediction out = SoftPrediction::Zero(num_labels, static_cast<Eigen::Index>(point_labels.size()));
  for (std::size_t p = 0; p < point_labels.size(); ++p) {
    const int l = point_labels[p];
    if (l >= num_labels) throw Error("predicted label out of range");
    if (l >= 0) out(l, static_cast<Eigen::Index>(p)) = 1.0;
  }
  return out;
}

std::vector<double> PerLabelIou(const GroundTruth& gt, const SoftPrediction& pred) {
  CheckShapes(gt, pred);
  const auto stats = Stats(gt, pred);
  std::vector<double> iou(gt.num_labels);
  for (int j = 0; j < gt.num_labels; ++j) {
    const LabelStats& s = stats[j];
    if (s.gt_mass == 0.0 && s.pred_mass == 0.0) {
      iou[j] = 1.0;
    } else {
      iou[j] = s.intersection / std::max(s.Union(), kUnionEpsilon);
    }
  }
  return iou;
}

double Miou(const GroundTruth& gt, const SoftPrediction& pred) {
  if (gt.num_labels == 0) return 1.0;
  const auto iou = PerLabelIou(gt, pred);
  double total = 0.0;
  for (double v : iou) total += v;
  return total / gt.num_labels;
}

double Miou(const GroundTruth& gt, std::span<const int> predicted_labels) {
  return Miou(gt, OneHot(predicted_labels, gt.num_labels));
}

double MriouLoss(const GroundTruth& gt, const SoftPrediction& pred) {
  return 1.0 - Miou(gt, pred);
}

SoftPrediction MriouGrad(const GroundTruth& gt, const SoftPrediction& pred) {
  CheckShapes(gt, pred);
  const auto stats = Stats(gt, pred);
  const double inv_m = 1.0 / gt.num_labels;
  SoftPrediction grad(pred.rows(), pred.cols());
  for (int j = 0; j < gt.num_labels; ++j) {
    const double inter = stats[j].intersection;
    const double uni = std::max(stats[j].Union(), kUnionEpsilon);
    const double inv_u2 = 1.0 / (uni * uni);
    // An in-label point raises I and leaves U unchanged; an out-of-label
    // point raises U only.
    const double inside = -inv_m / uni;
    const double outside = inv_m * inter * inv_u2;
    for (std::size_t p = 0; p < gt.num_points(); ++p) {
      grad(j, static_cast<Eigen::Index>(p)) = gt.point_labels[p] == j ? inside : outside;
    }
  }
  return grad;
}

CrossEntropyResult CrossEntropyLoss(const GroundTruth& gt,
                                    const Eigen::Ref<const Eigen::MatrixXd>& probs) {
  if (probs.rows() != static_cast<Eigen::Index>(gt.num_points()) ||
      probs.cols() != gt.num_labels + 1) {
    throw Error("probabilities must be N x (L+1)");
  }
  CrossEntropyResult out;
  if (gt.num_points() == 0) return out;
  for (std::size_t p = 0; p < gt.num_points(); ++p) {
    const int cls = gt.point_labels[p] < 0 ? gt.num_labels : gt.point_labels[p];
    double q = probs(static_cast<Eigen::Index>(p), cls);
    if (q < kProbabilityFloor) {
      q = kProbabilityFloor;
      ++out.clamped;
    }
    out.value -= std::log(q);
  }
  out.value /= static_cast<double>(gt.num_points());
  return out;
}

Eigen::MatrixXd CrossEntropyGrad(const GroundTruth& gt,
                                 const Eigen::Ref<const Eigen::MatrixXd>& probs) {
  if (probs.rows() != static_cast<Eigen::Index>(gt.num_points()) ||
      probs.cols() != gt.num_labels + 1) {
    throw Error("probabilities must be N x (L+1)");
  }
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
  if (gt.num_points() == 0) return grad;
  const double inv_n = 1.0 / static_cast<double>(gt.num_points());
  for (std::size_t p = 0; p < gt.num_points(); ++p) {
    const int cls = gt.point_labels[p] < 0 ? gt.num_labels : gt.point_labels[p];
    const double q = probs(static_cast<Eigen::Index>(p), cls);
    // The clamp is flat, so clamped points carry no gradient.
    if (q >= kProbabilityFloor) grad(static_cast<Eigen::Index>(p), cls) = -inv_n / q;
  }
  return grad;
}

}  // namespace liftseg::loss
