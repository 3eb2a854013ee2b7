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

#include "liftseg/weightnet.h"

#include <cmath>
#include <numbers>
#include <random>

#include "io_util.h"
#include "liftseg/error.h"

namespace liftseg::weightnet {

std::vector<double> PositionalEncoding(std::span<const double> x, int frequencies) {
  if (frequencies < 0) throw Error("positional encoding needs frequencies >= 0");
  std::vector<double> out;
  out.reserve(x.size() * (2 * frequencies + 1));
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("positional encoding input must be finite");
    out.push_back(v);
    double scale = std::numbers::pi;
    for (int f = 0; f < frequencies; ++f) {
      out.push_back(std::sin(scale * v));
      out.push_back(std::cos(scale * v));
      scale *= 2.0;
    }
  }
  return out;
}

EncodedBatch AssembleInputs(const detect::DetectionSet& detections,
                            std::span<const geom::Camera> cameras, int frequencies) {
  if (static_cast<int>(cameras.size()) != detections.num_views) {
    throw Error("detections declare K=" + std::to_string(detections.num_views) + " views but " +
                std::to_string(cameras.size()) + " cameras were given");
  }
  const int dim = EncodedDim(detections.feature_dim, frequencies);
  EncodedBatch batch(static_cast<Eigen::Index>(detections.size()), dim);
  for (std::size_t b = 0; b < detections.size(); ++b) {
    const detect::Detection& d = detections.detections[b];
    if (static_cast<int>(d.feature.size()) != detections.feature_dim) {
      throw Error("detection " + std::to_string(b) + " has feature dimension " +
                  std::to_string(d.feature.size()) + ", expected " +
                  std::to_string(detections.feature_dim));
    }
    if (d.view < 0 || d.view >= detections.num_views) {
      throw Error("detection " + std::to_string(b) + " has an invalid view index");
    }
    const auto row = static_cast<Eigen::Index>(b);
    int col = 0;
    for (float f : d.feature) batch(row, col++) = f;
    const geom::Vec3& dir = cameras[d.view].direction();
    const double direction[3] = {dir.x(), dir.y(), dir.z()};
    for (double v : PositionalEncoding(direction, frequencies)) batch(row, col++) = v;
    const double position[2] = {d.box.center_x() / detections.image_width,
                                d.box.center_y() / detections.image_height};
    for (double v : PositionalEncoding(position, frequencies)) batch(row, col++) = v;
  }
  return batch;
}

Eigen::MatrixXd ContextNormalize(const Eigen::MatrixXd& x, ContextNormCache* cache) {
  if (x.rows() == 0) {
    if (cache) {
      cache->inv_std = Eigen::RowVectorXd::Zero(x.cols());
      cache->normalized = x;
    }
    return x;
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.array().square().colwise().mean();
  const Eigen::RowVectorXd inv_std = (var.array() + kContextEpsilon).rsqrt();
  Eigen::MatrixXd out = centered.array().rowwise() * inv_std.array();
  if (cache) {
    cache->inv_std = inv_std;
    cache->normalized = out;
  }
  return out;
}

Eigen::MatrixXd ContextNormalizeBackward(const ContextNormCache& cache,
                                         const Eigen::MatrixXd& grad_out) {
  const Eigen::MatrixXd& xhat = cache.normalized;
  const auto rows = static_cast<double>(xhat.rows());
  if (xhat.rows() == 0) return grad_out;
  const Eigen::RowVectorXd sum_g = grad_out.colwise().sum();
  const Eigen::RowVectorXd sum_gx = (grad_out.array() * xhat.array()).colwise().sum();
  Eigen::MatrixXd grad = (rows * grad_out.array()).matrix().rowwise() - sum_g;
  grad.array() -= xhat.array().rowwise() * sum_gx.array();
  grad.array().rowwise() *= (cache.inv_std.array() / rows);
  return grad;
}

bool Params::operator==(const Params& other) const {
  return feature_dim == other.feature_dim && frequencies == other.frequencies &&
         tau == other.tau && null_score == other.null_score && seed == other.seed &&
         w1 == other.w1 && b1 == other.b1 && w2 == other.w2 && b2 == other.b2;
}

Params InitParams(int feature_dim, const InitOptions& options) {
  if (feature_dim < 0) throw Error("feature dimension must be non-negative");
  if (options.hidden < 1) throw Error("hidden width must be positive");
  if (!(options.tau > 0.0)) throw Error("tau must be positive");
  if (!(options.init_std >= 0.0)) throw Error("init std must be non-negative");
  Params p;
  p.feature_dim = feature_dim;
  p.frequencies = options.frequencies;
  p.tau = options.tau;
  p.null_score = options.null_score;
  p.seed = options.seed;
  const int in_dim = EncodedDim(feature_dim, options.frequencies);
  p.w1.resize(in_dim, options.hidden);
  p.b1.resize(options.hidden);
  p.w2.resize(options.hidden);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, options.init_std);
  auto draw = [&] { return options.init_std > 0.0 ? normal(rng) : 0.0; };
  for (int r = 0; r < in_dim; ++r) {
    for (int c = 0; c < options.hidden; ++c) p.w1(r, c) = draw();
  }
  for (int c = 0; c < options.hidden; ++c) p.b1(c) = draw();
  for (int c = 0; c < options.hidden; ++c) p.w2(c) = draw();
  p.b2 = draw();
  return p;
}

Eigen::VectorXd Forward(const Params& params, const EncodedBatch& batch,
                        ForwardCache* cache) {
  if (batch.cols() != params.input_dim()) {
    throw Error("batch has " + std::to_string(batch.cols()) + " input columns, network expects " +
                std::to_string(params.input_dim()));
  }
  ContextNormCache norm;
  const Eigen::MatrixXd pre = (batch * params.w1).rowwise() + params.b1.transpose();
  const Eigen::MatrixXd normalized = ContextNormalize(pre, &norm);
  Eigen::MatrixXd hidden = normalized.cwiseMax(0.0);
  Eigen::VectorXd logits = ((hidden * params.w2).array() + params.tau + params.b2).matrix();
  if (!logits.allFinite()) throw Error("weight network produced a non-finite activation");
  Eigen::VectorXd weights = logits.cwiseMax(0.0);
  if (cache) {
    cache->input = batch;
    cache->norm = std::move(norm);
    cache->hidden = std::move(hidden);
    cache->logits = std::move(logits);
  }
  return weights;
}

Gradients Backward(const Params& params, const ForwardCache& cache,
                   std::span<const double> grad_weights) {
  const Eigen::Index rows = cache.input.rows();
  if (static_cast<Eigen::Index>(grad_weights.size()) != rows ||
      cache.logits.size() != rows || cache.hidden.cols() != params.hidden() ||
      cache.input.cols() != params.input_dim()) {
    throw Error("forward cache does not match the gradient or the parameters");
  }
  Eigen::VectorXd g_logit(rows);
  for (Eigen::Index b = 0; b < rows; ++b) {
    g_logit(b) = cache.logits(b) > 0.0 ? grad_weights[b] : 0.0;
  }
  Gradients g;
  g.w2 = cache.hidden.transpose() * g_logit;
  g.b2 = g_logit.sum();
  Eigen::MatrixXd g_hidden = g_logit * params.w2.transpose();
  g_hidden.array() *= (cache.norm.normalized.array() > 0.0).cast<double>();
  const Eigen::MatrixXd g_pre = ContextNormalizeBackward(cache.norm, g_hidden);
  g.w1 = cache.input.transpose() * g_pre;
  g.b1 = g_pre.colwise().sum().transpose();
  g.input = g_pre * params.w1.transpose();
  return g;
}

Eigen::VectorXd Flatten(const Params& params) {
  const Eigen::Index n1 = params.w1.size(), h = params.hidden();
  Eigen::VectorXd flat(n1 + 2 * h + 2);
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < params.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.w1.cols(); ++c) flat(at++) = params.w1(r, c);
  }
  flat.segment(at, h) = params.b1;
  at += h;
  flat.segment(at, h) = params.w2;
  at += h;
  flat(at++) = params.b2;
  flat(at++) = params.null_score;
  return flat;
}

void Unflatten(const Eigen::VectorXd& flat, Params* params) {
  const Eigen::Index n1 = params->w1.size(), h = params->hidden();
  if (flat.size() != n1 + 2 * h + 2) throw Error("flat parameter vector has the wrong size");
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < params->w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < params->w1.cols(); ++c) params->w1(r, c) = flat(at++);
  }
  params->b1 = flat.segment(at, h);
  at += h;
  params->w2 = flat.segment(at, h);
  at += h;
  params->b2 = flat(at++);
  params->null_score = flat(at++);
}

Eigen::VectorXd Flatten(const Gradients& grads) {
  const Eigen::Index n1 = grads.w1.size(), h = grads.b1.size();
  Eigen::VectorXd flat(n1 + 2 * h + 2);
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < grads.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < grads.w1.cols(); ++c) flat(at++) = grads.w1(r, c);
  }
  flat.segment(at, h) = grads.b1;
  at += h;
  flat.segment(at, h) = grads.w2;
  at += h;
  flat(at++) = grads.b2;
  flat(at++) = grads.null_score;
  return flat;
}

std::string CheckpointJson(const Params& params) {
  nlohmann::json j;
  j["version"] = 1;
  j["feature_dim"] = params.feature_dim;
  j["frequencies"] = params.frequencies;
  j["input_dim"] = params.input_dim();
  j["hidden"] = params.hidden();
  j["tau"] = params.tau;
  j["null_score"] = params.null_score;
  j["seed"] = params.seed;
  std::vector<double> w1;
  w1.reserve(params.w1.size());
  for (Eigen::Index r = 0; r < params.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.w1.cols(); ++c) w1.push_back(params.w1(r, c));
  }
  j["w1"] = w1;
  j["b1"] = std::vector<double>(params.b1.data(), params.b1.data() + params.b1.size());
  j["w2"] = std::vector<double>(params.w2.data(), params.w2.data() + params.w2.size());
  j["b2"] = params.b2;
  return j.dump() + "\n";
}

void SaveCheckpoint(const Params& params, const std::string& path) {
  io::WriteFile(path, CheckpointJson(params));
}

Params LoadCheckpoint(const std::string& path) {
  const nlohmann::json j = io::ParseJsonFile(path);
  Params p;
  try {
    if (j.at("version").get<int>() != 1) throw ParseError(path, 0, "unsupported version");
    p.feature_dim = j.at("feature_dim").get<int>();
    p.frequencies = j.at("frequencies").get<int>();
    const int in_dim = j.at("input_dim").get<int>();
    const int hidden = j.at("hidden").get<int>();
    p.tau = j.at("tau").get<double>();
    p.null_score = j.at("null_score").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (p.feature_dim < 0 || p.frequencies < 0 || hidden < 1) {
      throw ParseError(path, 0, "declared shapes out of range");
    }
    if (in_dim != EncodedDim(p.feature_dim, p.frequencies)) {
      throw ParseError(path, 0, "input_dim " + std::to_string(in_dim) +
                                    " does not match feature_dim and frequencies");
    }
    const auto w1 = j.at("w1").get<std::vector<double>>();
    const auto b1 = j.at("b1").get<std::vector<double>>();
    const auto w2 = j.at("w2").get<std::vector<double>>();
    if (w1.size() != static_cast<std::size_t>(in_dim) * hidden || b1.size() != static_cast<std::size_t>(hidden) ||
        w2.size() != static_cast<std::size_t>(hidden)) {
      throw ParseError(path, 0, "parameter arrays do not match the declared shapes");
    }
    p.w1.resize(in_dim, hidden);
    for (int r = 0; r < in_dim; ++r) {
      for (int c = 0; c < hidden; ++c) p.w1(r, c) = w1[static_cast<std::size_t>(r) * hidden + c];
    }
    p.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), hidden);
    p.w2 = Eigen::Map<const Eigen::VectorXd>(w2.data(), hidden);
    p.b2 = j.at("b2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  if (!(p.tau > 0.0)) throw ParseError(path, 0, "tau must be positive");
  return p;
}

}  // namespace liftseg::weightnet
