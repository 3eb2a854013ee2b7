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

#include "liftseg/geom.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Geometry>

#include "liftseg/error.h"
#include "liftseg/parallel.h"

namespace liftseg::geom {

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error("point cloud is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw Error("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

NormalizedCloud NormalizeCloud(std::span<const Vec3> raw) {
  if (raw.empty()) throw Error("cannot normalize an empty point cloud");
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!raw[i].allFinite()) {
      throw Error("point " + std::to_string(i) + " has a non-finite coordinate");
    }
    centroid += raw[i];
  }
  centroid /= static_cast<double>(raw.size());

  double max_norm = 0.0;
  for (const Vec3& p : raw) max_norm = std::max(max_norm, (p - centroid).norm());

  Normalization transform;
  transform.center = centroid;
  transform.scale = max_norm > 0.0 ? 1.0 / max_norm : 1.0;

  std::vector<Vec3> out;
  out.reserve(raw.size());
  for (const Vec3& p : raw) out.push_back(transform.Apply(p));
  return {PointCloud(std::move(out)), transform};
}

SuperPointPartition::SuperPointPartition(std::vector<int> assignment,
                                         int num_superpoints)
    : assignment_(std::move(assignment)), num_superpoints_(num_superpoints) {
  if (num_superpoints_ < 1) throw Error("partition needs at least one super point");
  std::vector<int> counts(num_superpoints_, 0);
  for (std::size_t p = 0; p < assignment_.size(); ++p) {
    const int s = assignment_[p];
    if (s < 0 || s >= num_superpoints_) {
      throw Error("point " + std::to_string(p) + " has super point " +
                  std::to_string(s) + " outside [0, " +
                  std::to_string(num_superpoints_) + ")");
    }
    ++counts[s];
  }
  for (int s = 0; s < num_superpoints_; ++s) {
    if (counts[s] == 0) {
      throw Error("super point " + std::to_string(s) + " is empty");
    }
  }
  offsets_.assign(num_superpoints_ + 1, 0);
  for (int s = 0; s < num_superpoints_; ++s) offsets_[s + 1] = offsets_[s] + counts[s];
  members_.resize(assignment_.size());
  std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t p = 0; p < assignment_.size(); ++p) {
    members_[cursor[assignment_[p]]++] = static_cast<int>(p);
  }
}

std::span<const int> SuperPointPartition::members(int i) const {
  return std::span<const int>(members_).subspan(offsets_[i],
                                                offsets_[i + 1] - offsets_[i]);
}

Camera::Camera(const Vec3& direction, double distance, int width, int height,
               std::optional<double> fov_y)
    : distance_(distance), width_(width), height_(height) {
  if (!direction.allFinite() || direction.norm() == 0.0) {
    throw Error("camera direction must be a finite nonzero vector");
  }
  if (!(distance > 0.0) || !std::isfinite(distance)) {
    throw Error("camera distance must be positive");
  }
  if (width < 1 || height < 1) throw Error("camera image size must be positive");
  direction_ = direction.normalized();
  fov_y_ = fov_y.value_or(DefaultFovY(distance));
  if (!(fov_y_ > 0.0 && fov_y_ < std::numbers::pi)) {
    throw Error("camera field of view must lie in (0, pi)");
  }
  focal_ = 0.5 * height_ / std::tan(0.5 * fov_y_);

  forward_ = -direction_;
  Vec3 world_up = Vec3::UnitZ();
  if (std::abs(direction_.dot(world_up)) > 1.0 - 1e-6) world_up = Vec3::UnitX();
  right_ = forward_.cross(world_up).normalized();
  up_ = right_.cross(forward_);
}

double Camera::DefaultFovY(double distance) {
  constexpr double kFill = 0.9;
  if (distance <= 1.0) return 2.0 * std::atan(1.0 / kFill);
  const double half_angle = std::asin(1.0 / distance);
  return 2.0 * std::atan(std::tan(half_angle) / kFill);
}

Projection Camera::Project(const Vec3& p) const {
  const Vec3 v = p - position();
  Projection out;
  out.depth = v.dot(forward_);
  if (!(out.depth > kMinDepth)) return out;
  out.in_front = true;
  out.x = 0.5 * width_ + focal_ * v.dot(right_) / out.depth;
  out.y = 0.5 * height_ - focal_ * v.dot(up_) / out.depth;
  return out;
}

Vec3 Camera::Unproject(double x, double y, double depth) const {
  const double cx = (x - 0.5 * width_) * depth / focal_;
  const double cy = (0.5 * height_ - y) * depth / focal_;
  return position() + forward_ * depth + right_ * cx + up_ * cy;
}

std::optional<std::pair<int, int>> Camera::PixelOf(const Projection& proj) const {
  if (!proj.in_front) return std::nullopt;
  if (!(proj.x >= 0.0 && proj.x < width_ && proj.y >= 0.0 && proj.y < height_)) {
    return std::nullopt;
  }
  return std::make_pair(static_cast<int>(proj.x), static_cast<int>(proj.y));
}

bool Camera::operator==(const Camera& other) const {
  return direction_ == other.direction_ && distance_ == other.distance_ &&
         width_ == other.width_ && height_ == other.height_ &&
         fov_y_ == other.fov_y_;
}

std::vector<Camera> FixedViewpoints(int k, double distance, int width,
                                    int height) {
  if (k < 1) throw Error("number of viewpoints must be at least 1");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Camera> cameras;
  cameras.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / k;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    cameras.emplace_back(Vec3(r * std::cos(phi), r * std::sin(phi), z),
                         distance, width, height);
  }
  return cameras;
}

std::size_t VisibilityMap::CountVisible(int view) const {
  const auto bits = this->view(view);
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

SplatBuffer Splat(const PointCloud& cloud, const Camera& camera,
                  double splat_radius_px) {
  SplatBuffer buf;
  buf.width = camera.width();
  buf.height = camera.height();
  const std::size_t pixels = static_cast<std::size_t>(buf.width) * buf.height;
  buf.depth.assign(pixels, std::numeric_limits<double>::infinity());
  buf.owner.assign(pixels, -1);

  const int reach = static_cast<int>(std::floor(splat_radius_px));
  const double r2 = splat_radius_px * splat_radius_px;
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const Projection proj = camera.Project(cloud[p]);
    if (!proj.in_front) continue;
    if (proj.x < -reach - 1.0 || proj.x >= buf.width + reach + 1.0 ||
        proj.y < -reach - 1.0 || proj.y >= buf.height + reach + 1.0) {
      continue;
    }
    const int px = static_cast<int>(std::floor(proj.x));
    const int py = static_cast<int>(std::floor(proj.y));
    for (int dy = -reach; dy <= reach; ++dy) {
      const int y = py + dy;
      if (y < 0 || y >= buf.height) continue;
      for (int dx = -reach; dx <= reach; ++dx) {
        const int x = px + dx;
        if (x < 0 || x >= buf.width) continue;
        if (dx * dx + dy * dy > r2) continue;
        const std::size_t idx = static_cast<std::size_t>(y) * buf.width + x;
        if (proj.depth < buf.depth[idx]) {
          buf.depth[idx] = proj.depth;
          buf.owner[idx] = static_cast<int>(p);
        }
      }
    }
  }
  return buf;
}

VisibilityMap ComputeVisibility(const PointCloud& cloud,
                                std::span<const Camera> cameras,
                                const VisibilityOptions& options) {
  if (options.splat_radius_px < 0.0) throw Error("splat radius must be >= 0");
  if (!(options.depth_epsilon > 0.0)) throw Error("depth epsilon must be > 0");
  VisibilityMap map(static_cast<int>(cameras.size()), cloud.size());
  ParallelFor(cameras.size(), options.threads, [&](std::size_t k) {
    const Camera& camera = cameras[k];
    const SplatBuffer buf = Splat(cloud, camera, options.splat_radius_px);
    auto bits = map.mutable_view(static_cast<int>(k));
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      const Projection proj = camera.Project(cloud[p]);
      const auto pixel = camera.PixelOf(proj);
      if (!pixel) continue;
      const double front = buf.DepthAt(pixel->first, pixel->second);
      bits[p] = proj.depth <= front + options.depth_epsilon ? 1 : 0;
    }
  });
  return map;
}

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size)
    : points_(points), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw Error("grid cell size must be positive");
  if (points.empty()) {
    origin_ = Vec3::Zero();
    return;
  }
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo;
  const Vec3 extent = (hi - lo) / cell_;
  nx_ = static_cast<long long>(std::floor(extent.x())) + 1;
  ny_ = static_cast<long long>(std::floor(extent.y())) + 1;
  nz_ = static_cast<long long>(std::floor(extent.z())) + 1;

  std::vector<std::pair<long long, int>> entries;
  entries.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Key k = KeyOf(points[i]);
    entries.emplace_back((k.z * ny_ + k.y) * nx_ + k.x, static_cast<int>(i));
  }
  std::sort(entries.begin(), entries.end());
  keys_.reserve(entries.size());
  indices_.reserve(entries.size());
  for (const auto& [key, idx] : entries) {
    keys_.push_back(key);
    indices_.push_back(idx);
  }
}

PointGrid::Key PointGrid::KeyOf(const Vec3& p) const {
  const Vec3 c = (p - origin_) / cell_;
  return {static_cast<long long>(std::floor(c.x())),
          static_cast<long long>(std::floor(c.y())),
          static_cast<long long>(std::floor(c.z()))};
}

std::span<const int> PointGrid::Cell(long long x, long long y, long long z) const {
  if (x < 0 || y < 0 || z < 0 || x >= nx_ || y >= ny_ || z >= nz_) return {};
  const long long key = (z * ny_ + y) * nx_ + x;
  const auto [lo, hi] = std::equal_range(keys_.begin(), keys_.end(), key);
  return std::span<const int>(indices_).subspan(lo - keys_.begin(), hi - lo);
}

double MeanNearestNeighborDistance(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) return 0.0;
  Vec3 lo = cloud[0], hi = cloud[0];
  for (const Vec3& p : cloud.points()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double diag = (hi - lo).norm();
  if (diag == 0.0) return 0.0;
  const double cell = diag / std::sqrt(static_cast<double>(n));
  const PointGrid grid(cloud.points(), cell);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (double radius = cell;; radius *= 2.0) {
      grid.ForEachWithin(cloud[i], radius, [&](int j) {
        if (static_cast<std::size_t>(j) != i) {
          best = std::min(best, (cloud[j] - cloud[i]).norm());
        }
      });
      if (best < radius || radius > 4.0 * diag) break;
    }
    total += best;
  }
  return total / static_cast<double>(n);
}

}  // namespace liftseg::geom
