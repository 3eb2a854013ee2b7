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

#include "liftseg/synth.h"

#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>

#include "liftseg/detect.h"
#include "liftseg/error.h"
#include "liftseg/vote.h"
#include "test_util.h"

namespace liftseg::synth {
namespace {

using testing::PresetBundle;

SynthSpec TwoParts() {
  return ParseSynthSpec(
      "seed = 3\n"
      "category = pair\n"
      "[part]\nlabel = body\nshape = box\ncenter = 0 0 0\nsize = 0.4 0.3 0.2\npoints = 600\n"
      "[part]\nlabel = knob\nshape = sphere\ncenter = 0 0 0.45\nsize = 0.2\npoints = 400\n");
}

TEST(SynthSpecTest, ParsesPartsAndNoise) {
  const auto spec = ParseSynthSpec(
      "seed = 11\npreset = lamp\nspurious_rate = 0.3\njitter_px = 2\nconfidence = adversarial\n");
  EXPECT_EQ(spec.seed, 11u);
  EXPECT_EQ(spec.category, Preset("lamp").category);
  EXPECT_EQ(spec.parts, Preset("lamp").parts);
  EXPECT_EQ(spec.noise.spurious_rate, 0.3);
  EXPECT_EQ(spec.noise.jitter_px, 2.0);
  EXPECT_EQ(spec.noise.confidence, ConfidenceModel::kAdversarial);

  const auto two = TwoParts();
  ASSERT_EQ(two.parts.size(), 2u);
  EXPECT_EQ(two.parts[1].shape, Shape::kSphere);
  EXPECT_EQ(two.parts[1].center[2], 0.45);
  EXPECT_EQ(two.parts[0].points, 600);
}

TEST(SynthSpecTest, RejectsInvalidSpecs) {
  EXPECT_THROW(ParseSynthSpec("preset = sofa\n"), Error);
  EXPECT_THROW(ParseSynthSpec("preset = lamp\nspurious = 0.3\n"), ParseError);
  EXPECT_THROW(ParseSynthSpec("preset = lamp\ndrop_rate = 1.5\n"), Error);
  EXPECT_THROW(ParseSynthSpec("preset = lamp\nfeature_dim = 1\n"), Error);
  EXPECT_THROW(ParseSynthSpec("[part]\nlabel = a\nshape = cone\n"), Error);
  EXPECT_THROW(ParseSynthSpec("[part]\nlabel = a\npoints = 0\n"), Error);
  EXPECT_THROW(ParseSynthSpec("[bolt]\nlabel = a\n"), ParseError);
  EXPECT_THROW(Generate(SynthSpec{}), Error);
}

TEST(SynthSpecTest, PresetsHaveAtLeastThreeParts) {
  for (const auto& name : PresetNames()) {
    const auto spec = Preset(name);
    std::vector<std::string> labels;
    for (const auto& p : spec.parts) labels.push_back(p.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    EXPECT_GE(labels.size(), 3u) << name;
    EXPECT_NO_THROW(spec.Validate()) << name;
  }
}

TEST(SynthGenerateTest, DeterministicPerSeed) {
  const auto a = Generate(TwoParts());
  const auto b = Generate(TwoParts());
  EXPECT_TRUE(a == b);
  auto other = TwoParts();
  other.seed = 4;
  EXPECT_FALSE(Generate(other).scene.cloud == a.scene.cloud);
}

TEST(SynthGenerateTest, SuperPointsRespectParts) {
  const auto b = PresetBundle("chair", 2);
  const auto& part = b.scene.partition;
  for (int i = 0; i < part.num_superpoints(); ++i) {
    const int first = b.gt_instances[part.members(i)[0]];
    for (int p : part.members(i)) ASSERT_EQ(b.gt_instances[p], first) << "super point " << i;
  }
}

TEST(SynthGenerateTest, FullDropRateGivesNoDetections) {
  auto spec = Preset("table");
  spec.noise.drop_rate = 1.0;
  spec.noise.spurious_rate = 1.0;
  const auto b = Generate(spec);
  EXPECT_EQ(b.detections.size(), 0u);
  EXPECT_TRUE(b.truthful.empty());
}

// Every visible point of a part projects inside some box of its own label in
// that view.
TEST(SynthGenerateTest, ZeroNoiseBoxesCoverOwnParts) {
  for (const auto& b : {Generate(TwoParts()), PresetBundle("lamp", 1)}) {
    const auto& cloud = b.scene.cloud;
    for (int k = 0; k < b.visibility.num_views(); ++k) {
      const auto& cam = b.views.cameras[k];
      for (std::size_t p = 0; p < cloud.size(); ++p) {
        if (!b.visibility.visible(k, p)) continue;
        const auto proj = cam.Project(cloud[p]);
        bool covered = false;
        for (const auto& d : b.detections.detections) {
          if (d.view == k && d.label == b.scene.gt_labels[p] && d.box.Contains(proj.x, proj.y)) {
            covered = true;
          }
        }
        ASSERT_TRUE(covered) << "view " << k << " point " << p;
      }
    }
  }
}

TEST(SynthGenerateTest, TruthfulBoxesContainTheirPart) {
  auto spec = Preset("chair");
  spec.noise.spurious_rate = 0.5;
  spec.seed = 5;
  const auto b = Generate(spec);
  const auto& cloud = b.scene.cloud;
  for (std::size_t i = 0; i < b.detections.size(); ++i) {
    if (!b.truthful[i]) continue;
    const auto& d = b.detections.detections[i];
    const auto& cam = b.views.cameras[d.view];
    // Some instance carrying the detection's label is at least 90% inside.
    std::vector<int> inside(cloud.size(), 0);
    std::vector<int> visible(cloud.size(), 0);
    std::vector<int> label(cloud.size(), -1);
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      if (!b.visibility.visible(d.view, p)) continue;
      const auto proj = cam.Project(cloud[p]);
      const int q = b.gt_instances[p];
      label[q] = b.scene.gt_labels[p];
      ++visible[q];
      if (d.box.Contains(proj.x, proj.y)) ++inside[q];
    }
    bool covered = false;
    for (std::size_t q = 0; q < inside.size(); ++q) {
      if (label[q] == d.label && visible[q] > 0 && inside[q] >= 0.9 * visible[q]) covered = true;
    }
    EXPECT_TRUE(covered) << "detection " << i;
  }
}

TEST(SynthGenerateTest, FeatureComponentZeroSeparatesTruthfulness) {
  auto spec = Preset("chair");
  spec.noise.spurious_rate = 0.5;
  spec.noise.snr = 4.0;
  const auto b = Generate(spec);
  int spurious = 0;
  for (std::size_t i = 0; i < b.detections.size(); ++i) {
    const float f0 = b.detections.detections[i].feature[0];
    // Signal +-1 plus noise of standard deviation 1/snr bounded by sqrt(3)/snr.
    if (b.truthful[i]) {
      EXPECT_GT(f0, 0.0f);
    } else {
      EXPECT_LT(f0, 0.0f);
      ++spurious;
    }
  }
  EXPECT_GT(spurious, 0);
}

TEST(SynthGenerateTest, MaskMembershipWithinBoxMembership) {
  auto spec = Preset("table");
  spec.noise.box_pad_px = 10;
  const auto b = Generate(spec);
  const auto box = detect::ComputeMembership(b.scene.cloud, b.views.cameras, b.detections,
                                             detect::MembershipMode::kBox);
  const auto mask = detect::ComputeMembership(b.scene.cloud, b.views.cameras, b.detections,
                                              detect::MembershipMode::kMask);
  for (std::size_t d = 0; d < b.detections.size(); ++d) {
    for (int p : mask.members(d)) ASSERT_TRUE(box.contains(d, p));
  }
}

TEST(SynthGenerateTest, ZeroNoiseUnweightedLabelingIsAccurate) {
  for (const auto& name : PresetNames()) {
    const auto b = PresetBundle(name, 0);
    const auto mem = detect::ComputeMembership(b.scene.cloud, b.views.cameras, b.detections,
                                               detect::MembershipMode::kBox);
    const vote::VoteInputs in{b.scene.partition, b.visibility, mem, b.detections};
    const auto labels = vote::AssignLabels(vote::ScoreUnweighted(in), b.scene.partition);
    std::size_t correct = 0;
    for (std::size_t p = 0; p < labels.point_labels.size(); ++p) {
      if (labels.point_labels[p] == b.scene.gt_labels[p]) ++correct;
    }
    EXPECT_GE(static_cast<double>(correct) / labels.point_labels.size(), 0.99) << name;
  }
}

TEST(SynthEmitTest, RoundTripsThroughFiles) {
  auto spec = Preset("lamp");
  spec.noise.spurious_rate = 0.3;
  spec.noise.jitter_px = 1.5;
  const auto b = Generate(spec);
  testing::TempDir dir;
  Emit(b, dir.file("obj"));
  for (const char* f : {"cloud.txt", "labels.json", "cameras.json", "visibility.txt",
                        "detections.json", "truth.json", "instances.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.file("obj") + "/" + f)) << f;
  }
  EXPECT_TRUE(LoadBundle(dir.file("obj")) == b);
}

TEST(SynthEmitTest, SameSeedSameFilesDifferentSeedDifferentDetections) {
  testing::TempDir dir;
  auto spec = Preset("chair");
  spec.noise.spurious_rate = 0.3;
  Emit(Generate(spec), dir.file("a"));
  Emit(Generate(spec), dir.file("b"));
  spec.seed = 99;
  Emit(Generate(spec), dir.file("c"));
  for (const char* f : {"cloud.txt", "detections.json", "visibility.txt", "cameras.json"}) {
    EXPECT_EQ(testing::ReadFile(dir.file("a") + "/" + f), testing::ReadFile(dir.file("b") + "/" + f)) << f;
  }
  EXPECT_NE(testing::ReadFile(dir.file("a") + "/detections.json"),
            testing::ReadFile(dir.file("c") + "/detections.json"));
}

TEST(SynthEmitTest, UnwritableTargetFails) {
  testing::TempDir dir;
  testing::WriteFile(dir.file("plain"), "x");
  const auto b = Generate(TwoParts());
  EXPECT_THROW(Emit(b, dir.file("plain")), Error);
  EXPECT_THROW(Emit(b, dir.file("plain") + "/sub"), Error);
  EXPECT_THROW(LoadBundle(dir.file("missing")), Error);
}

TEST(TightBoxTest, PixelAligned) {
  const auto box = TightBox({{1.2, 3.7}, {4.9, 2.1}});
  EXPECT_EQ(box, (detect::Box{1, 2, 5, 4}));
}

}  // namespace
}  // namespace liftseg::synth
