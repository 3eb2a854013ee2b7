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

#include <vector>

#include <benchmark/benchmark.h>

#include "liftseg/detect.h"
#include "liftseg/synth.h"
#include "liftseg/train.h"
#include "liftseg/vote.h"

namespace {

using namespace liftseg;

const train::Object& NoisyChair() {
  static const train::Object object = [] {
    auto spec = synth::Preset("chair");
    spec.noise.spurious_rate = 0.3;
    spec.noise.jitter_px = 2.0;
    const auto b = synth::Generate(spec);
    return train::MakeObject(b.scene, b.views.cameras, b.visibility, b.detections,
                             detect::MembershipMode::kBox);
  }();
  return object;
}

void BM_Membership(benchmark::State& state) {
  const auto& o = NoisyChair();
  const auto mode = state.range(0) ? detect::MembershipMode::kMask : detect::MembershipMode::kBox;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect::ComputeMembership(o.scene.cloud, o.cameras, o.detections, mode));
  }
}
BENCHMARK(BM_Membership)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ScoreUnweighted(benchmark::State& state) {
  const auto& o = NoisyChair();
  for (auto _ : state) benchmark::DoNotOptimize(vote::ScoreUnweighted(o.inputs()));
}
BENCHMARK(BM_ScoreUnweighted);

void BM_ScoreWeightedWithTape(benchmark::State& state) {
  const auto& o = NoisyChair();
  const std::vector<double> w(o.detections.size(), 10.0);
  for (auto _ : state) {
    vote::VoteTape tape;
    benchmark::DoNotOptimize(vote::ScoreWeighted(o.inputs(), w, &tape));
  }
}
BENCHMARK(BM_ScoreWeightedWithTape);

void BM_ScoreWeightedBackward(benchmark::State& state) {
  const auto& o = NoisyChair();
  const std::vector<double> w(o.detections.size(), 10.0);
  vote::VoteTape tape;
  const auto s = vote::ScoreWeighted(o.inputs(), w, &tape);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(s.values.rows(), o.scene.num_labels());
  for (auto _ : state) benchmark::DoNotOptimize(vote::ScoreWeightedBackward(o.inputs(), tape, g));
}
BENCHMARK(BM_ScoreWeightedBackward);

}  // namespace

BENCHMARK_MAIN();
