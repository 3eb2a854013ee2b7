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

#include "liftseg/gradcheck.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "liftseg/loss.h"
#include "liftseg/weightnet.h"

namespace liftseg::gradcheck {
namespace {

using Clock = std::chrono::steady_clock;

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

class Tracker {
 public:
  Tracker(std::string name, double tolerance, double floor) : floor_(floor) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }

  void set_floor(double floor) { floor_ = floor; }

  void Compare(double analytic, double numeric, const std::string& what) {
    const double err = RelativeError(analytic, numeric, floor_);
    ++result_.entries;
    if (err > result_.max_error || !std::isfinite(err)) {
      result_.max_error = std::isfinite(err) ? err : INFINITY;
      char buf[96];
      std::snprintf(buf, sizeof(buf), " analytic=%.6e numeric=%.6e", analytic, numeric);
      result_.worst = what + buf;
    }
  }

  Result Finish(int instances, Clock::time_point start) {
    result_.instances = instances;
    result_.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result_;
  }

 private:
  double floor_;
  Result result_;
};

Eigen::MatrixXd RandomMatrix(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  }
  return m;
}

std::vector<int> RandomLabels(std::mt19937_64& rng, int n, int num_labels) {
  std::vector<int> out(n);
  for (int& v : out) v = UniformInt(rng, -1, num_labels - 1);
  return out;
}

weightnet::Params RandomParams(const Options& o, int feature_dim, std::uint64_t seed) {
  weightnet::InitOptions init;
  init.hidden = o.hidden;
  init.frequencies = o.frequencies;
  init.init_std = o.init_std;
  init.seed = seed;
  return weightnet::InitParams(feature_dim, init);
}

}  // namespace

double RelativeError(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

train::Object RandomInstance(std::uint64_t seed, const InstanceLimits& limits) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<float> gauss(0.0f, 1.0f);

  const int num_sp = UniformInt(rng, 1, limits.max_superpoints);
  const int n = UniformInt(rng, std::max(num_sp, 2), limits.max_points);
  const int num_labels = UniformInt(rng, 1, limits.max_labels);
  const int num_views = UniformInt(rng, 1, limits.max_views);
  const int num_dets = UniformInt(rng, 1, limits.max_detections);
  constexpr int kRes = 64;

  std::vector<geom::Vec3> pts(n);
  for (auto& p : pts) p = geom::Vec3(coord(rng), coord(rng), coord(rng));
  std::vector<int> assignment(n);
  for (int i = 0; i < n; ++i) assignment[i] = i < num_sp ? i : UniformInt(rng, 0, num_sp - 1);

  geom::Scene scene;
  scene.cloud = geom::PointCloud(std::move(pts));
  scene.partition = geom::SuperPointPartition(std::move(assignment), num_sp);
  scene.gt_labels = RandomLabels(rng, n, num_labels);
  for (int j = 0; j < num_labels; ++j) scene.label_names.push_back("part" + std::to_string(j));
  scene.category = "random";

  auto cameras = geom::FixedViewpoints(num_views, geom::Camera::kDefaultDistance, kRes, kRes);

  geom::VisibilityMap vis(num_views, n);
  for (int k = 0; k < num_views; ++k) {
    for (int p = 0; p < n; ++p) vis.set(k, p, unit(rng) < 0.7);
  }

  detect::DetectionSet dets;
  dets.num_views = num_views;
  dets.num_labels = num_labels;
  dets.feature_dim = limits.feature_dim;
  dets.labels = scene.label_names;
  dets.image_width = kRes;
  dets.image_height = kRes;
  std::vector<std::vector<int>> members(num_dets);
  for (int b = 0; b < num_dets; ++b) {
    detect::Detection d;
    d.view = UniformInt(rng, 0, num_views - 1);
    d.label = UniformInt(rng, 0, num_labels - 1);
    const double x0 = unit(rng) * kRes * 0.5;
    const double y0 = unit(rng) * kRes * 0.5;
    d.box = {x0, y0, x0 + 1.0 + unit(rng) * kRes * 0.5, y0 + 1.0 + unit(rng) * kRes * 0.5};
    for (int c = 0; c < limits.feature_dim; ++c) d.feature.push_back(gauss(rng));
    d.confidence = static_cast<float>(unit(rng));
    dets.detections.push_back(std::move(d));
    for (int p = 0; p < n; ++p) {
      if (unit(rng) < 0.5) members[b].push_back(p);
    }
  }

  train::Object obj;
  obj.scene = std::move(scene);
  obj.cameras = std::move(cameras);
  obj.visibility = std::move(vis);
  obj.detections = std::move(dets);
  obj.membership = detect::MembershipTensor(n, std::move(members));
  return obj;
}

Result CheckLoss(const Options& o) {
  const auto start = Clock::now();
  Tracker t("loss", 1e-4, o.floor);
  std::mt19937_64 rng(o.seed);
  const double h = o.step;
  for (int inst = 0; inst < o.instances; ++inst) {
    const int n = UniformInt(rng, 2, 30);
    const int num_labels = UniformInt(rng, 1, 4);
    const int num_sp = UniformInt(rng, 1, std::min(6, n));
    loss::GroundTruth gt{RandomLabels(rng, n, num_labels), num_labels};
    const std::string tag = "instance " + std::to_string(inst);

    // Relaxed mIoU with respect to the soft prediction.
    Eigen::MatrixXd pred = RandomMatrix(rng, num_labels, n, 0.05, 0.95);
    const Eigen::MatrixXd g = loss::MriouGrad(gt, pred);
    for (int j = 0; j < num_labels; ++j) {
      for (int p = 0; p < n; ++p) {
        Eigen::MatrixXd a = pred, b = pred;
        a(j, p) += h;
        b(j, p) -= h;
        const double fd = (loss::MriouLoss(gt, a) - loss::MriouLoss(gt, b)) / (2 * h);
        t.Compare(g(j, p), fd, tag + " mriou pred(" + std::to_string(j) + "," + std::to_string(p) + ")");
      }
    }

    // Cross-entropy with respect to per-point class probabilities.
    Eigen::MatrixXd probs = RandomMatrix(rng, n, num_labels + 1, 0.05, 1.0);
    const Eigen::MatrixXd ce = loss::CrossEntropyGrad(gt, probs);
    for (int p = 0; p < n; ++p) {
      for (int c = 0; c <= num_labels; ++c) {
        Eigen::MatrixXd a = probs, b = probs;
        a(p, c) += h;
        b(p, c) -= h;
        const double fd =
            (loss::CrossEntropyLoss(gt, a).value - loss::CrossEntropyLoss(gt, b).value) / (2 * h);
        t.Compare(ce(p, c), fd, tag + " ce probs(" + std::to_string(p) + "," + std::to_string(c) + ")");
      }
    }

    // Lifting composed with the relaxed mIoU.
    std::vector<int> assignment(n);
    for (int i = 0; i < n; ++i) assignment[i] = i < num_sp ? i : UniformInt(rng, 0, num_sp - 1);
    const geom::SuperPointPartition part(std::move(assignment), num_sp);
    Eigen::MatrixXd scores = RandomMatrix(rng, num_sp, num_labels, 0.05, 0.95);
    const Eigen::MatrixXd gs =
        loss::LiftScoresBackward(part, loss::MriouGrad(gt, loss::LiftScores(part, scores)));
    for (int i = 0; i < num_sp; ++i) {
      for (int j = 0; j < num_labels; ++j) {
        Eigen::MatrixXd a = scores, b = scores;
        a(i, j) += h;
        b(i, j) -= h;
        const double fd = (loss::MriouLoss(gt, loss::LiftScores(part, a)) -
                           loss::MriouLoss(gt, loss::LiftScores(part, b))) / (2 * h);
        t.Compare(gs(i, j), fd, tag + " lifted score(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  return t.Finish(o.instances, start);
}

Result CheckWeightnet(const Options& o) {
  const auto start = Clock::now();
  Tracker t("weightnet", 1e-4, o.floor);
  std::mt19937_64 rng(o.seed + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = o.step;
  for (int inst = 0; inst < o.instances; ++inst) {
    weightnet::Params params = RandomParams(o, o.feature_dim, rng());
    const int batch = UniformInt(rng, 2, 12);
    Eigen::MatrixXd x(batch, params.input_dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
    std::vector<double> readout(batch);
    for (double& c : readout) c = gauss(rng);
    // Zero-sum read-out keeps the objective small next to the constant tau.
    const double mean = std::accumulate(readout.begin(), readout.end(), 0.0) / batch;
    for (double& c : readout) c -= mean;
    const Eigen::Map<const Eigen::VectorXd> c(readout.data(), batch);

    const auto objective = [&](const weightnet::Params& p, const Eigen::MatrixXd& in) {
      return c.dot(weightnet::Forward(p, in));
    };

    weightnet::ForwardCache cache;
    const Eigen::VectorXd w = weightnet::Forward(params, x, &cache);
    // Round-off of a central difference grows with the summands, not the sum.
    t.set_floor(o.floor * std::max(1.0, c.cwiseAbs().dot(w)));
    const weightnet::Gradients g = weightnet::Backward(params, cache, readout);
    const Eigen::VectorXd ga = weightnet::Flatten(g);
    const Eigen::VectorXd flat = weightnet::Flatten(params);
    const std::string tag = "instance " + std::to_string(inst);
    // The null score is not a network parameter; skip the last entry.
    for (Eigen::Index i = 0; i + 1 < flat.size(); ++i) {
      weightnet::Params a = params, b = params;
      Eigen::VectorXd fa = flat, fb = flat;
      fa[i] += h;
      fb[i] -= h;
      weightnet::Unflatten(fa, &a);
      weightnet::Unflatten(fb, &b);
      const double fd = (objective(a, x) - objective(b, x)) / (2 * h);
      t.Compare(ga[i], fd, tag + " param " + std::to_string(i));
    }
    for (int r = 0; r < batch; ++r) {
      for (int col = 0; col < x.cols(); ++col) {
        Eigen::MatrixXd xa = x, xb = x;
        xa(r, col) += h;
        xb(r, col) -= h;
        const double fd = (objective(params, xa) - objective(params, xb)) / (2 * h);
        t.Compare(g.input(r, col), fd,
                  tag + " input(" + std::to_string(r) + "," + std::to_string(col) + ")");
      }
    }
  }
  return t.Finish(o.instances, start);
}

Result CheckEndToEnd(const Options& o) {
  const auto start = Clock::now();
  Tracker t("end_to_end", 1e-3, o.floor);
  std::mt19937_64 rng(o.seed + 2);
  const double h = o.step;
  InstanceLimits limits;
  limits.feature_dim = o.feature_dim;
  const train::LossKind kinds[] = {train::LossKind::kMriou, train::LossKind::kCrossEntropy,
                                   train::LossKind::kBoth};
  for (int inst = 0; inst < o.instances; ++inst) {
    const train::Object obj = RandomInstance(rng(), limits);
    weightnet::Params params = RandomParams(o, o.feature_dim, rng());
    const auto inputs = weightnet::AssembleInputs(obj.detections, obj.cameras, params.frequencies);
    const train::LossOptions lo{kinds[inst % 3], 0.5};
    const train::StepResult step = train::EvaluateObject(params, obj, inputs, lo, true);
    const Eigen::VectorXd flat = weightnet::Flatten(params);
    const std::string tag = "instance " + std::to_string(inst);
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
      weightnet::Params a = params, b = params;
      Eigen::VectorXd fa = flat, fb = flat;
      fa[i] += h;
      fb[i] -= h;
      weightnet::Unflatten(fa, &a);
      weightnet::Unflatten(fb, &b);
      const double fd = (train::EvaluateObject(a, obj, inputs, lo, false).loss -
                         train::EvaluateObject(b, obj, inputs, lo, false).loss) / (2 * h);
      t.Compare(step.gradient[i], fd, tag + " param " + std::to_string(i));
    }
  }
  return t.Finish(o.instances, start);
}

std::vector<Result> RunAll(const Options& options) {
  return {CheckLoss(options), CheckWeightnet(options), CheckEndToEnd(options)};
}

}  // namespace liftseg::gradcheck
