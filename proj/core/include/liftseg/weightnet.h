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

// Detection weight predictor: a two-layer MLP over per-detection inputs with
// context normalization between the layers and an offset hinge at the
// output, plus its hand-written reverse pass.
//
//   input  = feature ⊕ γ(view direction) ⊕ γ(normalized box center)
//   hidden = relu(context_norm(input · W1 + b1))
//   weight = max(tau + hidden · w2 + b2, 0)

#ifndef LIFTSEG_WEIGHTNET_H_
#define LIFTSEG_WEIGHTNET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liftseg/detect.h"
#include "liftseg/geom.h"

namespace liftseg::weightnet {

inline constexpr int kDefaultFrequencies = 10;
inline constexpr int kDefaultHidden = 256;
inline constexpr double kDefaultTau = 10.0;
inline constexpr double kDefaultNullScore = 10.0;
inline constexpr double kDefaultInitStd = 1e-4;
inline constexpr double kContextEpsilon = 1e-8;

// (x_i, sin(2^0 π x_i), cos(2^0 π x_i), ..., sin(2^(F-1) π x_i),
// cos(2^(F-1) π x_i)) concatenated over the coordinates.
std::vector<double> PositionalEncoding(std::span<const double> x, int frequencies);

constexpr int EncodedDim(int feature_dim, int frequencies) {
  return feature_dim + (3 + 2) * (2 * frequencies + 1);
}

// One row per detection.
using EncodedBatch = Eigen::MatrixXd;

EncodedBatch AssembleInputs(const detect::DetectionSet& detections,
                            std::span<const geom::Camera> cameras,
                            int frequencies = kDefaultFrequencies);

struct ContextNormCache {
  Eigen::RowVectorXd inv_std;
  Eigen::MatrixXd normalized;
};

// Standardizes every column across the rows of the batch:
// (x - mean) / sqrt(var + kContextEpsilon), population variance.
Eigen::MatrixXd ContextNormalize(const Eigen::MatrixXd& x,
                                 ContextNormCache* cache = nullptr);
Eigen::MatrixXd ContextNormalizeBackward(const ContextNormCache& cache,
                                         const Eigen::MatrixXd& grad_out);

struct Params {
  int feature_dim = 0;
  int frequencies = kDefaultFrequencies;
  double tau = kDefaultTau;
  double null_score = kDefaultNullScore;
  std::uint64_t seed = 0;
  Eigen::MatrixXd w1;  // input_dim x hidden
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;

  int input_dim() const { return static_cast<int>(w1.rows()); }
  int hidden() const { return static_cast<int>(w1.cols()); }
  bool operator==(const Params& other) const;
};

struct InitOptions {
  int hidden = kDefaultHidden;
  int frequencies = kDefaultFrequencies;
  double tau = kDefaultTau;
  double null_score = kDefaultNullScore;
  double init_std = kDefaultInitStd;
  std::uint64_t seed = 0;
};

// Every weight and bias drawn from N(0, init_std^2), so the initial output is
// close to tau for any batch.
Params InitParams(int feature_dim, const InitOptions& options = {});

struct ForwardCache {
  Eigen::MatrixXd input;
  ContextNormCache norm;
  Eigen::MatrixXd hidden;  // after relu
  Eigen::VectorXd logits;  // tau + hidden · w2 + b2
};

// Per-detection weights W(b) >= 0.
Eigen::VectorXd Forward(const Params& params, const EncodedBatch& batch,
                        ForwardCache* cache = nullptr);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
  double null_score = 0.0;  // filled by the caller that owns the softmax
  Eigen::MatrixXd input;
};

// Reverse pass for d loss / d W(b). The hinge has zero slope at the kink.
Gradients Backward(const Params& params, const ForwardCache& cache,
                   std::span<const double> grad_weights);

// Flat parameter vector order: w1 (row-major), b1, w2, b2, null_score.
Eigen::VectorXd Flatten(const Params& params);
void Unflatten(const Eigen::VectorXd& flat, Params* params);
Eigen::VectorXd Flatten(const Gradients& grads);

// JSON checkpoint with declared shapes; loading rejects shape mismatches.
std::string CheckpointJson(const Params& params);
void SaveCheckpoint(const Params& params, const std::string& path);
Params LoadCheckpoint(const std::string& path);

}  // namespace liftseg::weightnet

#endif  // LIFTSEG_WEIGHTNET_H_
