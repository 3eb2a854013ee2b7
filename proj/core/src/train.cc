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

#include "liftseg/train.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "io_util.h"
#include "liftseg/error.h"
#include "liftseg/eval.h"
#include "liftseg/kv_config.h"

namespace liftseg::train {
namespace {

std::string LossName(LossKind k) {
  switch (k) {
    case LossKind::kMriou: return "mriou";
    case LossKind::kCrossEntropy: return "cross_entropy";
    case LossKind::kBoth: return "both";
  }
  return "?";
}

}  // namespace

Optimizer::Optimizer(const TrainConfig& config, Eigen::Index size)
    : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Optimizer::Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  const double lr = config_.learning_rate;
  if (config_.optimizer == OptimizerKind::kSgd) {
    params -= lr * grad;
    return;
  }
  ++t_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config_.beta1, t_);
  const double c2 = 1.0 - std::pow(config_.beta2, t_);
  params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.adam_epsilon);
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error("learning rate must be finite and non-negative");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error("adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw Error("adam epsilon must be positive");
  if (!(mix >= 0.0 && mix <= 1.0)) throw Error("mixing weight must lie in [0, 1]");
  if (!(tau > 0.0)) throw Error("tau must be positive");
  if (frequencies < 0) throw Error("frequencies must be >= 0");
  if (hidden < 1) throw Error("hidden width must be >= 1");
  if (!std::isfinite(null_score_init)) throw Error("null score init must be finite");
  if (!(init_std >= 0.0)) throw Error("init std must be non-negative");
}

TrainConfig ParseTrainConfig(const std::string& text, const std::string& source) {
  const KvDocument doc = ParseKv(text, source);
  if (doc.sections.size() > 1) {
    throw ParseError(source, 0, "train config does not take sections");
  }
  const KvSection& s = doc.root();
  s.RequireKnownKeys({"epochs", "lr", "optimizer", "beta1", "beta2", "adam_eps", "seed", "loss",
                      "mix", "tau", "frequencies", "hidden", "null_score_init", "init_std"});
  TrainConfig c;
  if (auto v = s.GetInt("epochs")) c.epochs = static_cast<int>(*v);
  if (auto v = s.GetDouble("lr")) c.learning_rate = *v;
  if (auto v = s.GetString("optimizer")) {
    if (*v == "sgd") c.optimizer = OptimizerKind::kSgd;
    else if (*v == "adam") c.optimizer = OptimizerKind::kAdam;
    else throw ParseError(source, 0, "optimizer must be sgd or adam");
  }
  if (auto v = s.GetDouble("beta1")) c.beta1 = *v;
  if (auto v = s.GetDouble("beta2")) c.beta2 = *v;
  if (auto v = s.GetDouble("adam_eps")) c.adam_epsilon = *v;
  if (auto v = s.GetInt("seed")) c.seed = static_cast<std::uint64_t>(*v);
  if (auto v = s.GetString("loss")) {
    if (*v == "mriou") c.loss = LossKind::kMriou;
    else if (*v == "cross_entropy") c.loss = LossKind::kCrossEntropy;
    else if (*v == "both") c.loss = LossKind::kBoth;
    else throw ParseError(source, 0, "loss must be mriou, cross_entropy or both");
  }
  if (auto v = s.GetDouble("mix")) c.mix = *v;
  if (auto v = s.GetDouble("tau")) c.tau = *v;
  if (auto v = s.GetInt("frequencies")) c.frequencies = static_cast<int>(*v);
  if (auto v = s.GetInt("hidden")) c.hidden = static_cast<int>(*v);
  if (auto v = s.GetDouble("null_score_init")) c.null_score_init = *v;
  if (auto v = s.GetDouble("init_std")) c.init_std = *v;
  try {
    c.Validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, 0, e.what());
  }
  return c;
}

TrainConfig LoadTrainConfig(const std::string& path) {
  return ParseTrainConfig(io::ReadFile(path), path);
}

std::string ReportJson(const TrainReport& report, bool include_timing) {
  nlohmann::json j;
  j["epochs"] = report.epoch_loss.size();
  j["epoch_loss"] = report.epoch_loss;
  j["epoch_train_miou"] = report.epoch_train_miou;
  if (report.validation_miou) {
    j["validation_miou"] = *report.validation_miou;
  } else {
    j["validation_miou"] = nullptr;
  }
  if (include_timing) j["wall_time_seconds"] = report.wall_time_seconds;
  return j.dump(2) + "\n";
}

Object MakeObject(geom::Scene scene, std::vector<geom::Camera> cameras,
                  geom::VisibilityMap visibility, detect::DetectionSet detections,
                  detect::MembershipMode mode, int threads) {
  geom::ValidateScene(scene);
  if (visibility.num_points() != scene.cloud.size() ||
      visibility.num_views() != static_cast<int>(cameras.size())) {
    throw Error("visibility map does not match the scene and cameras");
  }
  if (detections.num_labels != scene.num_labels()) {
    throw Error("detections declare L=" + std::to_string(detections.num_labels) +
                ", scene has " + std::to_string(scene.num_labels()) + " labels");
  }
  Object obj;
  obj.membership = detect::ComputeMembership(scene.cloud, cameras, detections, mode, threads);
  obj.scene = std::move(scene);
  obj.cameras = std::move(cameras);
  obj.visibility = std::move(visibility);
  obj.detections = std::move(detections);
  return obj;
}

StepResult EvaluateObject(const weightnet::Params& params, const Object& object,
                          const weightnet::EncodedBatch& inputs,
                          const LossOptions& options, bool want_gradient) {
  const auto vin = object.inputs();
  const loss::GroundTruth gt = object.ground_truth();
  const int num_labels = gt.num_labels;
  const auto& partition = object.scene.partition;

  weightnet::ForwardCache cache;
  const Eigen::VectorXd weights = weightnet::Forward(params, inputs, &cache);
  vote::VoteTape tape;
  const vote::ScoreMatrix raw = vote::ScoreWeighted(
      vin, std::span<const double>(weights.data(), weights.size()), &tape);
  const vote::ScoreMatrix norm = vote::NormalizeScores(raw, params.null_score);

  const double ce_weight = options.kind == LossKind::kCrossEntropy ? 1.0
                           : options.kind == LossKind::kBoth       ? options.mix
                                                                   : 0.0;
  const double mriou_weight = 1.0 - ce_weight;

  StepResult result;
  Eigen::MatrixXd grad_norm = Eigen::MatrixXd::Zero(norm.values.rows(), norm.values.cols());
  if (mriou_weight > 0.0) {
    const loss::SoftPrediction pred = loss::LiftScores(partition, norm.values.leftCols(num_labels));
    result.loss += mriou_weight * loss::MriouLoss(gt, pred);
    if (want_gradient) {
      grad_norm.leftCols(num_labels) +=
          mriou_weight * loss::LiftScoresBackward(partition, loss::MriouGrad(gt, pred));
    }
  }
  if (ce_weight > 0.0) {
    const Eigen::MatrixXd probs = loss::LiftScores(partition, norm.values).transpose();
    result.loss += ce_weight * loss::CrossEntropyLoss(gt, probs).value;
    if (want_gradient) {
      const Eigen::MatrixXd g = loss::CrossEntropyGrad(gt, probs);
      grad_norm += ce_weight * loss::LiftScoresBackward(partition, g.transpose());
    }
  }
  const vote::Labeling labels = vote::AssignLabels(norm, partition);
  result.hard_miou = loss::Miou(gt, labels.point_labels);

  if (want_gradient) {
    const vote::SoftmaxGrad sg = vote::NormalizeScoresBackward(norm, grad_norm);
    const std::vector<double> grad_w = vote::ScoreWeightedBackward(vin, tape, sg.raw);
    weightnet::Gradients g = weightnet::Backward(params, cache, grad_w);
    g.null_score = sg.null_score;
    result.gradient = weightnet::Flatten(g);
  }
  return result;
}

vote::ScoreMatrix PredictScores(const weightnet::Params& params, const Object& object) {
  if (object.detections.feature_dim != params.feature_dim) {
    throw Error("checkpoint expects feature dimension " + std::to_string(params.feature_dim) +
                ", detections have " + std::to_string(object.detections.feature_dim));
  }
  const auto inputs = weightnet::AssembleInputs(object.detections, object.cameras, params.frequencies);
  const Eigen::VectorXd w = weightnet::Forward(params, inputs);
  const auto raw = vote::ScoreWeighted(object.inputs(), std::span<const double>(w.data(), w.size()));
  return vote::NormalizeScores(raw, params.null_score);
}

vote::Labeling PredictLabels(const weightnet::Params& params, const Object& object) {
  return vote::AssignLabels(PredictScores(params, object), object.scene.partition);
}

vote::Labeling LabelsForWeights(const Object& object, std::span<const double> weights,
                                double null_score) {
  const auto raw = vote::ScoreWeighted(object.inputs(), weights);
  return vote::AssignLabels(vote::NormalizeScores(raw, null_score), object.scene.partition);
}

TrainResult Train(std::span<const Object> train_objects,
                  std::span<const Object> validation_objects, const TrainConfig& config) {
  config.Validate();
  if (train_objects.empty()) throw Error("training needs at least one object");
  const int feature_dim = train_objects.front().detections.feature_dim;
  const int num_labels = train_objects.front().scene.num_labels();
  for (const Object& obj : train_objects) {
    if (obj.detections.feature_dim != feature_dim) {
      throw Error("training objects disagree on the feature dimension");
    }
    if (obj.scene.num_labels() != num_labels) {
      throw Error("training objects disagree on the label count");
    }
  }
  const auto start = std::chrono::steady_clock::now();

  weightnet::InitOptions init;
  init.hidden = config.hidden;
  init.frequencies = config.frequencies;
  init.tau = config.tau;
  init.null_score = config.null_score_init;
  init.init_std = config.init_std;
  init.seed = config.seed;
  TrainResult result{weightnet::InitParams(feature_dim, init), {}};

  std::vector<weightnet::EncodedBatch> inputs;
  inputs.reserve(train_objects.size());
  for (const Object& obj : train_objects) {
    inputs.push_back(weightnet::AssembleInputs(obj.detections, obj.cameras, config.frequencies));
  }

  Eigen::VectorXd flat = weightnet::Flatten(result.params);
  Optimizer optimizer(config, flat.size());
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_objects.size());
  std::iota(order.begin(), order.end(), 0);
  const LossOptions loss_options{config.loss, config.mix};

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    double miou_sum = 0.0;
    for (std::size_t idx : order) {
      StepResult step;
      try {
        step = EvaluateObject(result.params, train_objects[idx], inputs[idx], loss_options, true);
      } catch (const Error& e) {
        throw Error("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
      }
      if (!std::isfinite(step.loss) || !step.gradient.allFinite()) {
        throw Error("training diverged at epoch " + std::to_string(epoch) +
                    " (non-finite " + LossName(config.loss) + " loss or gradient)");
      }
      loss_sum += step.loss;
      miou_sum += step.hard_miou;
      optimizer.Step(flat, step.gradient);
      weightnet::Unflatten(flat, &result.params);
    }
    result.report.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
    result.report.epoch_train_miou.push_back(miou_sum / static_cast<double>(order.size()));
  }

  if (!validation_objects.empty()) {
    std::vector<std::vector<int>> labels;
    for (const Object& obj : validation_objects) {
      labels.push_back(PredictLabels(result.params, obj).point_labels);
    }
    result.report.validation_miou = SemanticMiou(validation_objects, labels);
  }
  result.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double SemanticMiou(std::span<const Object> objects,
                    std::span<const std::vector<int>> point_labels) {
  if (objects.size() != point_labels.size()) throw Error("one labeling per object is required");
  std::vector<eval::SemanticObject> items;
  items.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    items.push_back({objects[i].scene.category, objects[i].scene.label_names,
                     objects[i].scene.gt_labels, point_labels[i]});
  }
  return eval::EvaluateSemantic(items).overall_miou;
}

std::vector<double> ConfidenceWeights(const detect::DetectionSet& detections,
                                      ConfidenceMode mode, double tau) {
  std::vector<double> w;
  w.reserve(detections.size());
  for (const auto& d : detections.detections) w.push_back(d.confidence);
  if (mode == ConfidenceMode::kNormalized && !w.empty()) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const double target = tau * static_cast<double>(w.size());
    if (total > 0.0) {
      for (double& v : w) v *= target / total;
    } else {
      std::fill(w.begin(), w.end(), tau);
    }
  }
  return w;
}

double EvaluateConfidenceBaseline(std::span<const Object> objects, ConfidenceMode mode,
                                  double tau, double null_score) {
  std::vector<std::vector<int>> labels;
  labels.reserve(objects.size());
  for (const Object& obj : objects) {
    const auto w = ConfidenceWeights(obj.detections, mode, tau);
    labels.push_back(LabelsForWeights(obj, w, null_score).point_labels);
  }
  return SemanticMiou(objects, labels);
}

WeightSeparation MeasureSeparation(std::span<const double> weights,
                                   std::span<const std::uint8_t> truthful) {
  if (weights.size() != truthful.size()) throw Error("one truth flag per weight is required");
  WeightSeparation s;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (truthful[i]) {
      s.truthful_mean += weights[i];
      ++s.truthful_count;
    } else {
      s.spurious_mean += weights[i];
      ++s.spurious_count;
    }
  }
  if (s.truthful_count) s.truthful_mean /= static_cast<double>(s.truthful_count);
  if (s.spurious_count) s.spurious_mean /= static_cast<double>(s.spurious_count);
  double ss = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double mean = truthful[i] ? s.truthful_mean : s.spurious_mean;
    ss += (weights[i] - mean) * (weights[i] - mean);
  }
  const std::size_t dof = weights.size() >= 2 ? weights.size() - 2 : 0;
  s.pooled_std = dof > 0 ? std::sqrt(ss / static_cast<double>(dof)) : 0.0;
  return s;
}

}  // namespace liftseg::train
