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

// Few-shot training of the weight network against the relaxed mIoU (or
// cross-entropy) objective, inference through the weighted voting path, and
// the confidence-as-weight baselines.

#ifndef LIFTSEG_TRAIN_H_
#define LIFTSEG_TRAIN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liftseg/detect.h"
#include "liftseg/geom.h"
#include "liftseg/loss.h"
#include "liftseg/scene_io.h"
#include "liftseg/vote.h"
#include "liftseg/weightnet.h"

namespace liftseg::train {

enum class OptimizerKind { kSgd, kAdam };
enum class LossKind { kMriou, kCrossEntropy, kBoth };

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kMriou;
  double mix = 0.5;  // weight of cross-entropy when loss = kBoth
  double tau = weightnet::kDefaultTau;
  int frequencies = weightnet::kDefaultFrequencies;
  int hidden = weightnet::kDefaultHidden;
  double null_score_init = weightnet::kDefaultNullScore;
  double init_std = weightnet::kDefaultInitStd;

  void Validate() const;
};

// SGD or Adam with bias correction over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(const TrainConfig& config, Eigen::Index size);
  void Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

 private:
  TrainConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  int t_ = 0;
};

// Keys: epochs, lr, optimizer (sgd|adam), beta1, beta2, adam_eps, seed,
// loss (mriou|cross_entropy|both), mix, tau, frequencies, hidden,
// null_score_init, init_std.
TrainConfig ParseTrainConfig(const std::string& text, const std::string& source = "<string>");
TrainConfig LoadTrainConfig(const std::string& path);

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_train_miou;
  std::optional<double> validation_miou;
  double wall_time_seconds = 0.0;
};

// Wall time is left out unless requested so reports are reproducible.
std::string ReportJson(const TrainReport& report, bool include_timing = false);

// One object with everything the voting path needs.
struct Object {
  geom::Scene scene;
  std::vector<geom::Camera> cameras;
  geom::VisibilityMap visibility;
  detect::DetectionSet detections;
  detect::MembershipTensor membership;

  vote::VoteInputs inputs() const {
    return {scene.partition, visibility, membership, detections};
  }
  loss::GroundTruth ground_truth() const { return {scene.gt_labels, scene.num_labels()}; }
};

Object MakeObject(geom::Scene scene, std::vector<geom::Camera> cameras,
                  geom::VisibilityMap visibility, detect::DetectionSet detections,
                  detect::MembershipMode mode, int threads = 1);

struct LossOptions {
  LossKind kind = LossKind::kMriou;
  double mix = 0.5;
};

struct StepResult {
  double loss = 0.0;
  double hard_miou = 0.0;
  Eigen::VectorXd gradient;  // flat, same layout as weightnet::Flatten
};

// Full forward pass for one object; the gradient is filled when requested.
StepResult EvaluateObject(const weightnet::Params& params, const Object& object,
                          const weightnet::EncodedBatch& inputs,
                          const LossOptions& options, bool want_gradient);

// Softmax-path scores and labels under the network's weights.
vote::ScoreMatrix PredictScores(const weightnet::Params& params, const Object& object);
vote::Labeling PredictLabels(const weightnet::Params& params, const Object& object);

// Softmax-path labels for an explicit weight per detection.
vote::Labeling LabelsForWeights(const Object& object, std::span<const double> weights,
                                double null_score);

struct TrainResult {
  weightnet::Params params;
  TrainReport report;
};

// Deterministic given config.seed. Objects are visited in a seeded shuffled
// order each epoch, one optimizer step per object.
TrainResult Train(std::span<const Object> train_objects,
                  std::span<const Object> validation_objects, const TrainConfig& config);

// Category-averaged semantic mIoU of softmax-path labelings.
double SemanticMiou(std::span<const Object> objects,
                    std::span<const std::vector<int>> point_labels);

enum class ConfidenceMode { kRaw, kNormalized };

// Weights equal to detection confidences (kRaw) or confidences rescaled so
// they sum to detection count x tau (kNormalized).
std::vector<double> ConfidenceWeights(const detect::DetectionSet& detections,
                                      ConfidenceMode mode, double tau);

double EvaluateConfidenceBaseline(std::span<const Object> objects, ConfidenceMode mode,
                                  double tau = weightnet::kDefaultTau,
                                  double null_score = weightnet::kDefaultNullScore);

// Per-detection mean predicted weight split by an external truth flag.
struct WeightSeparation {
  double truthful_mean = 0.0;
  double spurious_mean = 0.0;
  double pooled_std = 0.0;
  std::size_t truthful_count = 0;
  std::size_t spurious_count = 0;
};
WeightSeparation MeasureSeparation(std::span<const double> weights,
                                   std::span<const std::uint8_t> truthful);

}  // namespace liftseg::train

#endif  // LIFTSEG_TRAIN_H_
