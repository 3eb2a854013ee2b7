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

#include "liftseg/detect.h"

#include <random>

#include <gtest/gtest.h>

#include "liftseg/error.h"
#include "liftseg/rle.h"
#include "test_util.h"

namespace liftseg::detect {
namespace {

using geom::Camera;
using geom::PointCloud;
using geom::Vec3;

DetectionSet OneViewSet(int width, int height, int labels = 1, int dim = 2) {
  DetectionSet set;
  set.num_views = 1;
  set.num_labels = labels;
  set.feature_dim = dim;
  for (int j = 0; j < labels; ++j) set.labels.push_back("part" + std::to_string(j));
  set.image_width = width;
  set.image_height = height;
  return set;
}

Detection MakeDetection(Box box, int label = 0) {
  Detection d;
  d.box = box;
  d.label = label;
  d.feature = {0.25f, -1.5f};
  d.confidence = 0.75f;
  return d;
}

PointCloud RandomCloud(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return PointCloud(pts);
}

TEST(BoxTest, HalfOpenContainment) {
  const Box b{10, 20, 30, 40};
  EXPECT_TRUE(b.Contains(10, 20));
  EXPECT_TRUE(b.Contains(29.999, 39.999));
  EXPECT_FALSE(b.Contains(30, 25));
  EXPECT_FALSE(b.Contains(15, 40));
  EXPECT_FALSE(b.Contains(9.999, 25));
}

TEST(CropWindowTest, CoversTouchedPixels) {
  const auto w = CropWindow({1.5, 2.0, 4.2, 5.0});
  EXPECT_EQ(w.x, 1);
  EXPECT_EQ(w.y, 2);
  EXPECT_EQ(w.width, 4);
  EXPECT_EQ(w.height, 3);
}

TEST(RleTest, RoundTripsAndStartsWithZeros) {
  const std::vector<std::uint8_t> bits{1, 1, 0, 0, 0, 1, 0};
  const auto runs = EncodeRle(bits);
  EXPECT_EQ(runs, (std::vector<int>{0, 2, 3, 1, 1}));
  EXPECT_EQ(DecodeRle(runs, bits.size()), bits);
  EXPECT_EQ(EncodeRle(std::vector<std::uint8_t>{}), std::vector<int>{0});
}

TEST(RleTest, RandomBitmapsRoundTrip) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint8_t> bits(std::uniform_int_distribution<int>(0, 200)(rng));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() % 2);
    EXPECT_EQ(DecodeRle(EncodeRle(bits), bits.size()), bits);
  }
}

TEST(RleTest, RejectsBadRuns) {
  EXPECT_THROW(DecodeRle(std::vector<int>{2, -1, 3}, 4), Error);
  EXPECT_THROW(DecodeRle(std::vector<int>{2, 3}, 4), Error);
}

TEST(MaskTest, RleRoundTrip) {
  std::vector<std::uint8_t> bits{0, 1, 1, 0, 1, 0};
  const Mask m(3, 2, bits);
  EXPECT_EQ(Mask::FromRle(3, 2, m.ToRle()), m);
  EXPECT_EQ(m.CountSet(), 3u);
  EXPECT_TRUE(m.at(1, 0));
  EXPECT_TRUE(m.at(1, 1));
  EXPECT_FALSE(m.at(2, 1));
}

class MembershipTest : public ::testing::Test {
 protected:
  MembershipTest() : cam_(Vec3(0, 0, 1), 2.2, 64, 48) {}

  // Point whose projection lands at continuous pixel (x, y) at depth 2.
  Vec3 PointAt(double x, double y) const { return cam_.Unproject(x, y, 2.0); }

  Camera cam_;
};

TEST_F(MembershipTest, CenterIsMemberAndOutsideIsNot) {
  auto set = OneViewSet(64, 48);
  set.detections.push_back(MakeDetection({10, 10, 20, 20}));
  const PointCloud cloud({PointAt(15, 15), PointAt(21, 15), PointAt(19.5, 19.5), PointAt(20, 15)});
  const std::vector<Camera> cams{cam_};
  const auto m = ComputeMembership(cloud, cams, set, MembershipMode::kBox);
  EXPECT_EQ(std::vector<int>(m.members(0).begin(), m.members(0).end()), (std::vector<int>{0, 2}));
  EXPECT_TRUE(m.contains(0, 0));
  EXPECT_FALSE(m.contains(0, 1));
  EXPECT_FALSE(m.contains(0, 3));
}

TEST_F(MembershipTest, CheckerboardMaskRefinesFullImageBox) {
  auto set = OneViewSet(64, 48);
  std::vector<std::uint8_t> bits(64 * 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) bits[y * 64 + x] = (x + y) % 2 == 0;
  }
  auto d = MakeDetection({0, 0, 64, 48});
  d.mask = Mask(64, 48, bits);
  set.detections.push_back(d);
  const auto cloud = RandomCloud(2000, 3);
  const std::vector<Camera> cams{cam_};
  const auto box = ComputeMembership(cloud, cams, set, MembershipMode::kBox);
  const auto mask = ComputeMembership(cloud, cams, set, MembershipMode::kMask);
  // Per-pixel brute force.
  std::vector<int> want_box, want_mask;
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const auto pr = cam_.Project(cloud[p]);
    if (!pr.in_front || pr.x < 0 || pr.x >= 64 || pr.y < 0 || pr.y >= 48) continue;
    want_box.push_back(static_cast<int>(p));
    const int px = static_cast<int>(std::floor(pr.x)), py = static_cast<int>(std::floor(pr.y));
    if ((px + py) % 2 == 0) want_mask.push_back(static_cast<int>(p));
  }
  EXPECT_EQ(std::vector<int>(box.members(0).begin(), box.members(0).end()), want_box);
  EXPECT_EQ(std::vector<int>(mask.members(0).begin(), mask.members(0).end()), want_mask);
  EXPECT_LT(mask.members(0).size(), box.members(0).size());
  for (int p : mask.members(0)) EXPECT_TRUE(box.contains(0, p));
}

TEST_F(MembershipTest, MaskCroppedToBoxWindow) {
  auto set = OneViewSet(64, 48);
  auto d = MakeDetection({10.5, 10, 13, 12});
  // Window x 10..12, y 10..11; only pixel (12, 11) set.
  d.mask = Mask(3, 2, {0, 0, 0, 0, 0, 1});
  set.detections.push_back(d);
  const PointCloud cloud({PointAt(12.5, 11.5), PointAt(11.5, 11.5), PointAt(12.5, 10.5)});
  const std::vector<Camera> cams{cam_};
  const auto m = ComputeMembership(cloud, cams, set, MembershipMode::kMask);
  EXPECT_EQ(std::vector<int>(m.members(0).begin(), m.members(0).end()), std::vector<int>{0});
}

TEST_F(MembershipTest, MaskModeWithoutMaskNamesDetection) {
  auto set = OneViewSet(64, 48);
  auto with = MakeDetection({0, 0, 4, 4});
  with.mask = Mask(4, 4, std::vector<std::uint8_t>(16, 1));
  set.detections.push_back(with);
  set.detections.push_back(MakeDetection({0, 0, 4, 4}));
  const std::vector<Camera> cams{cam_};
  try {
    ComputeMembership(RandomCloud(10, 1), cams, set, MembershipMode::kMask);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("detection 1"), std::string::npos) << e.what();
  }
}

TEST_F(MembershipTest, IndependentOfDetectionOrder) {
  auto set = OneViewSet(64, 48, 2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  for (int b = 0; b < 6; ++b) {
    const double x = u(rng), y = u(rng);
    set.detections.push_back(MakeDetection({x, y * 0.8, x + 20, y * 0.8 + 15}, b % 2));
  }
  auto reversed = set;
  std::reverse(reversed.detections.begin(), reversed.detections.end());
  const auto cloud = RandomCloud(500, 5);
  const std::vector<Camera> cams{cam_};
  const auto a = ComputeMembership(cloud, cams, set, MembershipMode::kBox);
  const auto b = ComputeMembership(cloud, cams, reversed, MembershipMode::kBox, 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto x = a.members(i);
    const auto y = b.members(set.size() - 1 - i);
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
  }
}

TEST(DetectionIoTest, EmptySetRoundTrips) {
  testing::TempDir dir;
  DetectionSet set;
  set.num_views = 10;
  set.num_labels = 3;
  set.feature_dim = 8;
  set.labels = {"a", "b", "c"};
  SaveDetections(set, dir.file("d.json"));
  EXPECT_EQ(LoadDetections(dir.file("d.json")), set);
}

TEST(DetectionIoTest, MaskAndFeaturesRoundTripExactly) {
  testing::TempDir dir;
  auto set = OneViewSet(800, 800, 1, 2);
  set.num_views = 2;
  auto d = MakeDetection({100.25, 200, 103, 202});
  d.view = 1;
  d.feature = {0.1f, 1.0f / 3.0f};
  d.confidence = 0.123456789f;
  d.mask = Mask(3, 2, {1, 0, 1, 1, 1, 0});
  set.detections.push_back(d);
  set.detections.push_back(MakeDetection({0, 0, 800, 800}));
  SaveDetections(set, dir.file("d.json"));
  const auto back = LoadDetections(dir.file("d.json"));
  EXPECT_EQ(back, set);
  SaveDetections(back, dir.file("e.json"));
  EXPECT_EQ(testing::ReadFile(dir.file("d.json")), testing::ReadFile(dir.file("e.json")));
}

TEST(DetectionIoTest, RejectsInvertedBox) {
  testing::TempDir dir;
  testing::WriteFile(dir.file("d.json"), R"({"version": 1, "K": 1, "L": 1, "D": 1,
    "labels": ["a"], "detections": [
    {"k": 0, "j": 0, "box": [30, 0, 10, 5], "conf": 1.0, "feature": [0], "mask_rle": null}]})");
  EXPECT_THROW(LoadDetections(dir.file("d.json")), Error);
}

TEST(DetectionIoTest, RejectsSchemaViolations) {
  testing::TempDir dir;
  testing::WriteFile(dir.file("a.json"), R"({"version": 1, "K": 1, "L": 1, "D": 2,
    "labels": ["a"], "detections": [
    {"k": 0, "j": 0, "box": [0, 0, 10, 5], "conf": 1.0, "feature": [0], "mask_rle": null}]})");
  EXPECT_THROW(LoadDetections(dir.file("a.json")), Error);
  testing::WriteFile(dir.file("b.json"), R"({"version": 1, "K": 1, "L": 1, "D": 1,
    "labels": ["a"], "detections": [
    {"k": 3, "j": 0, "box": [0, 0, 10, 5], "conf": 1.0, "feature": [0], "mask_rle": null}]})");
  EXPECT_THROW(LoadDetections(dir.file("b.json")), Error);
  testing::WriteFile(dir.file("c.json"), "{not json");
  EXPECT_THROW(LoadDetections(dir.file("c.json")), Error);
}

TEST(DetectionSetTest, ValidateRejectsMaskOutsideBox) {
  auto set = OneViewSet(64, 48);
  auto d = MakeDetection({0, 0, 4, 4});
  d.mask = Mask(5, 4, std::vector<std::uint8_t>(20, 1));
  set.detections.push_back(d);
  EXPECT_THROW(set.Validate(), Error);
}

}  // namespace
}  // namespace liftseg::detect
