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

// Finite-difference checks of the hand-written reverse passes.

#ifndef LIFTSEG_GRADCHECK_H_
#define LIFTSEG_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "liftseg/train.h"

namespace liftseg::gradcheck {

struct Options {
  std::uint64_t seed = 0;
  int instances = 20;
  int hidden = 8;
  int frequencies = 2;
  int feature_dim = 3;
  double init_std = 0.3;
  double step = 1e-5;
  // Relative error is |a - f| / max(|a|, |f|, floor).
  double floor = 1e-6;
};

struct Result {
  std::string name;
  int instances = 0;
  std::size_t entries = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string worst;  // description of the worst entry
  double seconds = 0.0;

  bool passed() const { return max_error < tolerance; }
};

struct InstanceLimits {
  int max_points = 30;
  int max_superpoints = 6;
  int max_labels = 4;
  int max_detections = 12;
  int max_views = 4;
  int feature_dim = 3;
};

// Small random object with random visibility and membership; cameras are
// real so the positional inputs are well defined.
train::Object RandomInstance(std::uint64_t seed, const InstanceLimits& limits = {});

double RelativeError(double analytic, double numeric, double floor);

// Relaxed mIoU, cross-entropy and lifting gradients. Tolerance 1e-4.
Result CheckLoss(const Options& options);
// Weight network parameters and inputs under a random linear read-out.
// Tolerance 1e-4.
Result CheckWeightnet(const Options& options);
// Parameters through weighted voting, softmax, lifting and the loss.
// Tolerance 1e-3.
Result CheckEndToEnd(const Options& options);

std::vector<Result> RunAll(const Options& options);

}  // namespace liftseg::gradcheck

#endif  // LIFTSEG_GRADCHECK_H_
