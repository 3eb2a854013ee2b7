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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

namespace liftseg::loss {
namespace {

GroundTruth Gt(std::vector<int> labels, int num_labels) { return {std::move(labels), num_labels}; }

// IoU straight from the set definitions: sum of min over sum of max.
double OracleMiou(const GroundTruth& gt, const SoftPrediction& pred) {
  double total = 0.0;
  for (int j = 0; j < gt.num_labels; ++j) {
    double inter = 0.0, uni = 0.0, gsum = 0.0, psum = 0.0;
    for (std::size_t p = 0; p < gt.num_points(); ++p) {
      const double g = gt.point_labels[p] == j ? 1.0 : 0.0;
      const double q = pred(j, static_cast<Eigen::Index>(p));
      inter += g * q;
      uni += g + q - g * q;
      gsum += g;
      psum += q;
    }
    if (gsum == 0.0 && psum == 0.0) {
      total += 1.0;
    } else {
      total += inter / uni;
    }
  }
  return total / gt.num_labels;
}

TEST(LiftScoresTest, ConstantLiftAndLoopOracle) {
  const geom::SuperPointPartition one({0, 0, 0}, 1);
  Eigen::MatrixXd s(1, 1);
  s << 0.7;
  const auto l = LiftScores(one, s);
  ASSERT_EQ(l.rows(), 1);
  ASSERT_EQ(l.cols(), 3);
  for (int p = 0; p < 3; ++p) EXPECT_EQ(l(0, p), 0.7);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> assign(40);
  for (int p = 0; p < 40; ++p) assign[p] = p < 6 ? p : static_cast<int>(rng() % 6);
  const geom::SuperPointPartition part(assign, 6);
  Eigen::MatrixXd scores(6, 3);
  for (Eigen::Index i = 0; i < scores.size(); ++i) scores(i) = u(rng);
  const auto lifted = LiftScores(part, scores);
  for (int j = 0; j < 3; ++j) {
    for (int p = 0; p < 40; ++p) EXPECT_EQ(lifted(j, p), scores(assign[p], j));
  }
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 3);
  EXPECT_EQ(LiftScores(part, ones), Eigen::MatrixXd::Ones(3, 40));
}

TEST(LiftScoresTest, BackwardIsTranspose) {
  const geom::SuperPointPartition part({0, 1, 1, 2, 0}, 3);
  Eigen::MatrixXd g(2, 5);
  g << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  const auto b = LiftScoresBackward(part, g);
  ASSERT_EQ(b.rows(), 3);
  ASSERT_EQ(b.cols(), 2);
  EXPECT_EQ(b(0, 0), 6.0);
  EXPECT_EQ(b(1, 0), 5.0);
  EXPECT_EQ(b(2, 0), 4.0);
  EXPECT_EQ(b(0, 1), 16.0);
}

TEST(MiouTest, IdentityIsOne) {
  const auto gt = Gt({0, 1, 1, -1, 2}, 3);
  EXPECT_EQ(Miou(gt, OneHot(gt.point_labels, 3)), 1.0);
  EXPECT_EQ(Miou(gt, std::vector<int>(gt.point_labels)), 1.0);
}

TEST(MiouTest, OverlapOfTwoPointSets) {
  const auto gt = Gt({0, 0, -1}, 1);
  EXPECT_NEAR(Miou(gt, std::vector<int>{-1, 0, 0}), 1.0 / 3.0, 1e-15);
}

TEST(MiouTest, SoftPredictionUsesRelaxedIou) {
  const auto gt = Gt({0, 0, -1, -1}, 1);
  SoftPrediction pred = SoftPrediction::Constant(1, 4, 0.5);
  EXPECT_NEAR(Miou(gt, pred), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(MriouLoss(gt, pred), 2.0 / 3.0, 1e-15);
}

TEST(MiouTest, EmptyLabelConvention) {
  // Label 1 absent from both sides, label 2 only predicted.
  const auto gt = Gt({0, 0, 0}, 3);
  const auto per = PerLabelIou(gt, OneHot(std::vector<int>{0, 0, 2}, 3));
  EXPECT_NEAR(per[0], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(per[1], 1.0);
  EXPECT_EQ(per[2], 0.0);
}

TEST(MiouTest, MatchesOracleAndIsPermutationSymmetric) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const int n = 25, l = 4;
    std::vector<int> labels(n);
    for (auto& x : labels) x = static_cast<int>(rng() % (l + 1)) - 1;
    const auto gt = Gt(labels, l);
    SoftPrediction pred(l, n);
    for (Eigen::Index i = 0; i < pred.size(); ++i) pred(i) = u(rng) < 0.2 ? 0.0 : u(rng);
    const double m = Miou(gt, pred);
    EXPECT_NEAR(m, OracleMiou(gt, pred), 1e-12);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
    const std::vector<int> perm{2, 0, 3, 1};
    std::vector<int> relabeled(labels);
    for (auto& x : relabeled) x = x < 0 ? x : perm[x];
    SoftPrediction permuted(l, n);
    for (int j = 0; j < l; ++j) permuted.row(perm[j]) = pred.row(j);
    EXPECT_NEAR(Miou(Gt(relabeled, l), permuted), m, 1e-12);
  }
}

TEST(MriouLossTest, PerfectAndEmpty) {
  const auto gt = Gt({0, 1, 1}, 2);
  EXPECT_EQ(MriouLoss(gt, OneHot(gt.point_labels, 2)), 0.0);
  EXPECT_EQ(MriouLoss(gt, SoftPrediction::Zero(2, 3)), 1.0);
}

TEST(MriouLossTest, HardPredictionsAreExact) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> a(30), b(30);
    for (auto& x : a) x = static_cast<int>(rng() % 4) - 1;
    for (auto& x : b) x = static_cast<int>(rng() % 4) - 1;
    const auto gt = Gt(a, 3);
    EXPECT_NEAR(MriouLoss(gt, OneHot(b, 3)), 1.0 - Miou(gt, b), 1e-15);
  }
}

TEST(MriouGradTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int t = 0; t < 20; ++t) {
    const int n = 5 + static_cast<int>(rng() % 26), l = 1 + static_cast<int>(rng() % 4);
    std::vector<int> labels(n);
    for (auto& x : labels) x = static_cast<int>(rng() % (l + 1)) - 1;
    const auto gt = Gt(labels, l);
    SoftPrediction pred(l, n);
    for (Eigen::Index i = 0; i < pred.size(); ++i) pred(i) = u(rng);
    const auto grad = MriouGrad(gt, pred);
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      auto up = pred, down = pred;
      up(i) += 1e-5;
      down(i) -= 1e-5;
      const double fd = (MriouLoss(gt, up) - MriouLoss(gt, down)) / 2e-5;
      EXPECT_LT(std::abs(grad(i) - fd) / std::max({std::abs(grad(i)), std::abs(fd), 1e-6}), 1e-4);
    }
  }
}

TEST(MriouGradTest, ExactPredictionAndSigns) {
  const auto gt = Gt({0, 0, 1, -1}, 2);
  const auto pred = OneHot(gt.point_labels, 2);
  const auto grad = MriouGrad(gt, pred);
  EXPECT_TRUE(grad.allFinite());
  for (int j = 0; j < 2; ++j) {
    for (int p = 0; p < 4; ++p) {
      const auto up = [&] { auto x = pred; x(j, p) += 1e-5; return x; }();
      const auto down = [&] { auto x = pred; x(j, p) -= 1e-5; return x; }();
      const double fd = (MriouLoss(gt, up) - MriouLoss(gt, down)) / 2e-5;
      EXPECT_LT(std::abs(grad(j, p) - fd) / std::max({std::abs(grad(j, p)), std::abs(fd), 1e-6}), 1e-6);
      if (gt.point_labels[p] != j) {
        EXPECT_GE(grad(j, p), 0.0);
      }
    }
  }
}

TEST(MriouGradTest, DegenerateLabelHasZeroGradient) {
  const auto gt = Gt({0, 0}, 2);
  SoftPrediction pred = SoftPrediction::Zero(2, 2);
  pred(0, 0) = 0.5;
  const auto grad = MriouGrad(gt, pred);
  EXPECT_EQ(grad(1, 0), 0.0);
  EXPECT_EQ(grad(1, 1), 0.0);
}

TEST(CrossEntropyTest, Examples) {
  Eigen::MatrixXd certain(1, 2);
  certain << 1.0, 0.0;
  EXPECT_EQ(CrossEntropyLoss(Gt({0}, 1), certain).value, 0.0);
  Eigen::MatrixXd half(1, 2);
  half << 0.5, 0.5;
  EXPECT_NEAR(CrossEntropyLoss(Gt({0}, 1), half).value, std::numbers::ln2, 1e-15);
  Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
  EXPECT_NEAR(CrossEntropyLoss(Gt({0, 1, -1}, 2), uniform).value, std::log(3.0), 1e-15);
}

TEST(CrossEntropyTest, ZeroProbabilityIsClampedAndFlagged) {
  Eigen::MatrixXd p(2, 2);
  p << 0.0, 1.0, 1.0, 0.0;
  const auto r = CrossEntropyLoss(Gt({0, 0}, 1), p);
  EXPECT_EQ(r.clamped, 1u);
  EXPECT_NEAR(r.value, -std::log(kProbabilityFloor) / 2.0, 1e-12);
}

TEST(CrossEntropyTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const auto gt = Gt({0, 2, -1, 1}, 3);
  Eigen::MatrixXd p(4, 4);
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = u(rng);
  const auto grad = CrossEntropyGrad(gt, p);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    auto up = p, down = p;
    up(i) += 1e-6;
    down(i) -= 1e-6;
    const double fd = (CrossEntropyLoss(gt, up).value - CrossEntropyLoss(gt, down).value) / 2e-6;
    EXPECT_NEAR(grad(i), fd, 1e-6);
  }
}

}  // namespace
}  // namespace liftseg::loss
