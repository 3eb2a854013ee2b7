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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "liftseg/error.h"
#include "liftseg/loss.h"
#include "liftseg/synth.h"
#include "test_util.h"

namespace liftseg::train {
namespace {

using testing::ObjectFromBundle;
using testing::PresetBundle;

TrainConfig SmallConfig(int epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.hidden = 16;
  c.frequencies = 2;
  c.seed = 3;
  return c;
}

// Relaxed mIoU loss of the softmax path with every weight equal to tau.
double UniformLoss(const Object& obj, double tau, double null_score) {
  const std::vector<double> w(obj.detections.size(), tau);
  const auto raw = vote::ScoreWeighted(obj.inputs(), w);
  const auto norm = vote::NormalizeScores(raw, null_score);
  const int l = obj.scene.num_labels();
  const auto lifted = loss::LiftScores(obj.scene.partition, norm.values.leftCols(l));
  return loss::MriouLoss(obj.ground_truth(), lifted);
}

TEST(TrainConfigTest, ParsesKeys) {
  const auto c = ParseTrainConfig(
      "epochs = 7\nlr = 0.01\noptimizer = sgd\nloss = both\nmix = 0.25\n"
      "tau = 5\nfrequencies = 3\nhidden = 12\nnull_score_init = 4\ninit_std = 0.001\nseed = 9\n");
  EXPECT_EQ(c.epochs, 7);
  EXPECT_EQ(c.learning_rate, 0.01);
  EXPECT_EQ(c.optimizer, OptimizerKind::kSgd);
  EXPECT_EQ(c.loss, LossKind::kBoth);
  EXPECT_EQ(c.mix, 0.25);
  EXPECT_EQ(c.tau, 5.0);
  EXPECT_EQ(c.frequencies, 3);
  EXPECT_EQ(c.hidden, 12);
  EXPECT_EQ(c.null_score_init, 4.0);
  EXPECT_EQ(c.init_std, 0.001);
  EXPECT_EQ(c.seed, 9u);
}

TEST(TrainConfigTest, RejectsBadInput) {
  EXPECT_THROW(ParseTrainConfig("epoch = 3\n"), ParseError);
  EXPECT_THROW(ParseTrainConfig("epochs = 0\n"), ParseError);
  EXPECT_THROW(ParseTrainConfig("mix = 1.5\n"), ParseError);
  EXPECT_THROW(ParseTrainConfig("lr = -1\n"), ParseError);
  EXPECT_THROW(ParseTrainConfig("optimizer = rmsprop\n"), ParseError);
  EXPECT_THROW(ParseTrainConfig("[net]\nhidden = 3\n"), ParseError);
  try {
    ParseTrainConfig("epochs = 3\nlr = fast\n", "cfg.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.path(), "cfg.txt");
  }
}

TEST(TrainReportTest, TimingIsOptIn) {
  TrainReport r;
  r.epoch_loss = {0.5, 0.25};
  r.epoch_train_miou = {0.5, 0.75};
  r.wall_time_seconds = 1.5;
  EXPECT_EQ(ReportJson(r).find("wall_time"), std::string::npos);
  EXPECT_NE(ReportJson(r, true).find("wall_time"), std::string::npos);
  EXPECT_NE(ReportJson(r).find("\"validation_miou\": null"), std::string::npos);
}

TEST(OptimizerTest, ZeroGradientIsIdentity) {
  for (auto kind : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
    TrainConfig c;
    c.optimizer = kind;
    c.learning_rate = 0.1;
    Optimizer opt(c, 4);
    Eigen::VectorXd x(4);
    x << 1, -2, 3, 0.5;
    const Eigen::VectorXd before = x;
    for (int t = 0; t < 5; ++t) opt.Step(x, Eigen::VectorXd::Zero(4));
    EXPECT_EQ(x, before);
  }
}

TEST(OptimizerTest, AdamFirstStepMovesByLearningRate) {
  TrainConfig c;
  c.learning_rate = 0.01;
  Optimizer opt(c, 2);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd g(2);
  g << 3.0, -0.5;
  opt.Step(x, g);
  EXPECT_NEAR(x(0), -0.01, 1e-9);
  EXPECT_NEAR(x(1), 0.01, 1e-9);
}

class TrainOnBundleTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    bundle_ = new synth::SynthBundle(PresetBundle("lamp", 4));
    object_ = new Object(ObjectFromBundle(*bundle_));
  }
  static void TearDownTestSuite() {
    delete object_;
    delete bundle_;
  }
  std::span<const Object> one() const { return {object_, 1}; }

  static synth::SynthBundle* bundle_;
  static Object* object_;
};
synth::SynthBundle* TrainOnBundleTest::bundle_ = nullptr;
Object* TrainOnBundleTest::object_ = nullptr;

TEST_F(TrainOnBundleTest, ZeroLearningRateLeavesParametersAndLoss) {
  auto c = SmallConfig(4);
  c.learning_rate = 0.0;
  const auto r = Train(one(), {}, c);
  weightnet::InitOptions init;
  init.hidden = c.hidden;
  init.frequencies = c.frequencies;
  init.tau = c.tau;
  init.null_score = c.null_score_init;
  init.init_std = c.init_std;
  init.seed = c.seed;
  EXPECT_TRUE(r.params == weightnet::InitParams(object_->detections.feature_dim, init));
  ASSERT_EQ(r.report.epoch_loss.size(), 4u);
  for (double l : r.report.epoch_loss) EXPECT_EQ(l, r.report.epoch_loss[0]);
}

TEST_F(TrainOnBundleTest, SameSeedSameCheckpoint) {
  const auto c = SmallConfig(5);
  const auto a = Train(one(), one(), c);
  const auto b = Train(one(), one(), c);
  EXPECT_EQ(weightnet::CheckpointJson(a.params), weightnet::CheckpointJson(b.params));
  EXPECT_EQ(ReportJson(a.report), ReportJson(b.report));
  EXPECT_TRUE(a.report.validation_miou.has_value());
}

TEST_F(TrainOnBundleTest, PerfectDetectionsLossDoesNotIncrease) {
  const auto r = Train(one(), {}, SmallConfig(50));
  const auto& loss = r.report.epoch_loss;
  ASSERT_EQ(loss.size(), 50u);
  for (std::size_t e = 1; e < loss.size(); ++e) EXPECT_LE(loss[e], loss[e - 1] + 1e-12) << "epoch " << e;
  EXPECT_GE(r.report.epoch_train_miou.back(), r.report.epoch_train_miou.front());
  for (double l : loss) EXPECT_TRUE(std::isfinite(l));
}

TEST_F(TrainOnBundleTest, FeaturesAreFrozen) {
  const auto before = object_->detections;
  Train(one(), {}, SmallConfig(3));
  EXPECT_EQ(object_->detections, before);
}

TEST_F(TrainOnBundleTest, ZeroInitLossEqualsUniformWeights) {
  auto c = SmallConfig(1);
  c.init_std = 0.0;
  const auto r = Train(one(), {}, c);
  EXPECT_NEAR(r.report.epoch_loss[0], UniformLoss(*object_, c.tau, c.null_score_init), 1e-12);
}

TEST_F(TrainOnBundleTest, DefaultInitLossEqualsUniformWeights) {
  TrainConfig c;
  c.epochs = 1;
  const auto r = Train(one(), {}, c);
  EXPECT_NEAR(r.report.epoch_loss[0], UniformLoss(*object_, c.tau, c.null_score_init), 1e-6);
}

TEST_F(TrainOnBundleTest, AllLossKindsTrain) {
  for (auto kind : {LossKind::kCrossEntropy, LossKind::kBoth}) {
    auto c = SmallConfig(3);
    c.loss = kind;
    const auto r = Train(one(), {}, c);
    EXPECT_EQ(r.report.epoch_loss.size(), 3u);
    EXPECT_TRUE(std::isfinite(r.report.epoch_loss.back()));
  }
}

TEST_F(TrainOnBundleTest, DivergenceNamesEpoch) {
  auto c = SmallConfig(5);
  c.optimizer = OptimizerKind::kSgd;
  c.learning_rate = 1e308;
  try {
    Train(one(), {}, c);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos) << e.what();
  }
}

TEST_F(TrainOnBundleTest, EqualConfidencesNormalizedMatchUniformWeights) {
  Object obj = *object_;
  for (auto& d : obj.detections.detections) d.confidence = 0.3f;
  const auto w = ConfidenceWeights(obj.detections, ConfidenceMode::kNormalized, 10.0);
  for (double x : w) EXPECT_NEAR(x, 10.0, 1e-12);
  const std::vector<double> tau(obj.detections.size(), 10.0);
  EXPECT_EQ(LabelsForWeights(obj, w, 10.0), LabelsForWeights(obj, tau, 10.0));
}

TEST_F(TrainOnBundleTest, PredictedScoresAreNormalized) {
  const auto r = Train(one(), {}, SmallConfig(2));
  const auto s = PredictScores(r.params, *object_);
  EXPECT_EQ(s.kind, vote::ScoreKind::kNormalized);
  for (Eigen::Index i = 0; i < s.values.rows(); ++i) EXPECT_NEAR(s.values.row(i).sum(), 1.0, 1e-9);
  const auto l = PredictLabels(r.params, *object_);
  EXPECT_EQ(l, vote::AssignLabels(s, object_->scene.partition));
}

TEST(ConfidenceBaselineTest, EmptyDetectionSetLabelsEverythingNull) {
  auto spec = synth::Preset("lamp");
  spec.noise.drop_rate = 1.0;
  const auto b = synth::Generate(spec);
  ASSERT_EQ(b.detections.size(), 0u);
  const auto obj = ObjectFromBundle(b);
  const auto l = LabelsForWeights(obj, {}, 10.0);
  for (int x : l.point_labels) EXPECT_EQ(x, vote::kNullLabel);
  const std::vector<Object> objs{obj};
  // Every part has ground truth and no prediction, so each IoU is 0.
  EXPECT_EQ(EvaluateConfidenceBaseline(objs, ConfidenceMode::kRaw), 0.0);
  EXPECT_EQ(EvaluateConfidenceBaseline(objs, ConfidenceMode::kNormalized), 0.0);
}

TEST(ConfidenceWeightsTest, RawAndNormalized) {
  detect::DetectionSet set;
  for (float c : {0.2f, 0.6f, 0.2f}) {
    detect::Detection d;
    d.confidence = c;
    set.detections.push_back(d);
  }
  const auto raw = ConfidenceWeights(set, ConfidenceMode::kRaw, 10.0);
  EXPECT_NEAR(raw[1], 0.6, 1e-7);
  const auto norm = ConfidenceWeights(set, ConfidenceMode::kNormalized, 10.0);
  EXPECT_NEAR(norm[0] + norm[1] + norm[2], 30.0, 1e-9);
  EXPECT_NEAR(norm[1] / norm[0], 3.0, 1e-6);
}

TEST(MeasureSeparationTest, HandComputed) {
  const std::vector<double> w{10, 12, 14, 2, 4};
  const std::vector<std::uint8_t> t{1, 1, 1, 0, 0};
  const auto s = MeasureSeparation(w, t);
  EXPECT_EQ(s.truthful_count, 3u);
  EXPECT_EQ(s.spurious_count, 2u);
  EXPECT_DOUBLE_EQ(s.truthful_mean, 12.0);
  EXPECT_DOUBLE_EQ(s.spurious_mean, 3.0);
  // Within-group sum of squares 8 + 2 over 5 - 2 degrees of freedom.
  EXPECT_NEAR(s.pooled_std, std::sqrt(10.0 / 3.0), 1e-12);
}

TEST(MakeObjectTest, RejectsMismatchedVisibility) {
  const auto b = PresetBundle("lamp", 1);
  geom::VisibilityMap wrong(b.visibility.num_views(), b.visibility.num_points() + 1);
  EXPECT_THROW(MakeObject(b.scene, b.views.cameras, wrong, b.detections, detect::MembershipMode::kBox),
               Error);
  auto dets = b.detections;
  dets.num_labels += 1;
  dets.labels.push_back("extra");
  EXPECT_THROW(MakeObject(b.scene, b.views.cameras, b.visibility, dets, detect::MembershipMode::kBox),
               Error);
}

}  // namespace
}  // namespace liftseg::train
