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

// Shared helpers for the unit tests and the acceptance binary.

#ifndef LIFTSEG_TESTS_TEST_UTIL_H_
#define LIFTSEG_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liftseg/detect.h"
#include "liftseg/geom.h"
#include "liftseg/synth.h"
#include "liftseg/train.h"
#include "liftseg/vote.h"

namespace liftseg::testing {

// Directory under the system temp dir, removed with its contents on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("liftseg_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

// Coverage scores straight from the definition: for every super point, label
// and view, sum over visible points of the best weight among that view's
// label-j detections containing the point, divided by the visible count.
inline Eigen::MatrixXd NaiveScores(const vote::VoteInputs& in, int num_labels,
                                   std::span<const double> weights) {
  const auto& part = in.partition;
  const int views = in.visibility.num_views();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(part.num_superpoints(), num_labels);
  for (int i = 0; i < part.num_superpoints(); ++i) {
    double den = 0.0;
    std::vector<double> num(num_labels, 0.0);
    for (int k = 0; k < views; ++k) {
      for (std::size_t p = 0; p < part.num_points(); ++p) {
        if (part.superpoint_of(p) != i || !in.visibility.visible(k, p)) continue;
        den += 1.0;
        for (int j = 0; j < num_labels; ++j) {
          double best = 0.0;
          for (std::size_t b = 0; b < in.detections.size(); ++b) {
            const auto& d = in.detections.detections[b];
            if (d.view != k || d.label != j) continue;
            if (in.membership.contains(b, static_cast<int>(p))) best = std::max(best, weights[b]);
          }
          num[j] += best;
        }
      }
    }
    for (int j = 0; j < num_labels; ++j) out(i, j) = den > 0.0 ? num[j] / den : 0.0;
  }
  return out;
}

// Random voting instance over synthetic memberships, without cameras.
struct RandomVote {
  geom::SuperPointPartition partition;
  geom::VisibilityMap visibility;
  detect::MembershipTensor membership;
  detect::DetectionSet detections;
  std::vector<double> weights;

  vote::VoteInputs inputs() const { return {partition, visibility, membership, detections}; }
};

inline RandomVote MakeRandomVote(std::uint64_t seed, int n, int s, int labels, int views,
                                 int max_dets) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomVote r;
  std::vector<int> assign(n);
  for (int p = 0; p < n; ++p) {
    assign[p] = p < s ? p : std::uniform_int_distribution<int>(0, s - 1)(rng);
  }
  r.partition = geom::SuperPointPartition(assign, s);
  r.visibility = geom::VisibilityMap(views, n);
  for (int k = 0; k < views; ++k) {
    for (int p = 0; p < n; ++p) r.visibility.set(k, p, u(rng) < 0.7);
  }
  r.detections.num_views = views;
  r.detections.num_labels = labels;
  r.detections.feature_dim = 1;
  for (int j = 0; j < labels; ++j) r.detections.labels.push_back("l" + std::to_string(j));
  const int dets = std::uniform_int_distribution<int>(0, max_dets)(rng);
  std::vector<std::vector<int>> members;
  for (int b = 0; b < dets; ++b) {
    detect::Detection d;
    d.view = std::uniform_int_distribution<int>(0, views - 1)(rng);
    d.label = std::uniform_int_distribution<int>(0, labels - 1)(rng);
    d.box = {0.0, 0.0, 10.0, 10.0};
    d.feature = {0.0f};
    r.detections.detections.push_back(d);
    std::vector<int> m;
    for (int p = 0; p < n; ++p) {
      if (u(rng) < 0.4) m.push_back(p);
    }
    members.push_back(std::move(m));
    r.weights.push_back(5.0 * u(rng));
  }
  r.membership = detect::MembershipTensor(n, std::move(members));
  return r;
}

inline train::Object ObjectFromBundle(const synth::SynthBundle& b,
                                      detect::MembershipMode mode = detect::MembershipMode::kBox) {
  return train::MakeObject(b.scene, b.views.cameras, b.visibility, b.detections, mode);
}

inline synth::SynthBundle PresetBundle(const std::string& preset, std::uint64_t seed) {
  auto spec = synth::Preset(preset);
  spec.seed = seed;
  return synth::Generate(spec);
}

}  // namespace liftseg::testing

#endif  // LIFTSEG_TESTS_TEST_UTIL_H_
