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

// Point clouds, super-point partitions, pinhole cameras on a view sphere and
// z-buffer visibility.

#ifndef LIFTSEG_GEOM_H_
#define LIFTSEG_GEOM_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace liftseg::geom {

using Vec3 = Eigen::Vector3d;

class PointCloud {
 public:
  PointCloud() = default;
  // Throws liftseg::Error on an empty cloud or a non-finite coordinate.
  explicit PointCloud(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Vec3> points() const { return points_; }

  bool operator==(const PointCloud& other) const = default;

 private:
  std::vector<Vec3> points_;
};

// p_normalized = (p - center) * scale.
struct Normalization {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  Vec3 Apply(const Vec3& p) const { return (p - center) * scale; }
};

struct NormalizedCloud {
  PointCloud cloud;
  Normalization transform;
};

// Centers the cloud on its centroid and scales it so the farthest point sits
// on the unit sphere. A cloud whose points all coincide maps to the origin
// with scale 1.
NormalizedCloud NormalizeCloud(std::span<const Vec3> raw);

// Per-point super-point assignment. Every super point is nonempty.
class SuperPointPartition {
 public:
  SuperPointPartition() = default;
  // Throws liftseg::Error if an index is outside [0, num_superpoints) or a
  // super point receives no point.
  SuperPointPartition(std::vector<int> assignment, int num_superpoints);

  int num_superpoints() const { return num_superpoints_; }
  std::size_t num_points() const { return assignment_.size(); }
  int superpoint_of(std::size_t point) const { return assignment_[point]; }
  std::span<const int> assignment() const { return assignment_; }
  // Point indices of super point i in increasing order.
  std::span<const int> members(int i) const;

  bool operator==(const SuperPointPartition& other) const {
    return num_superpoints_ == other.num_superpoints_ &&
           assignment_ == other.assignment_;
  }

 private:
  std::vector<int> assignment_;
  int num_superpoints_ = 0;
  std::vector<int> offsets_;
  std::vector<int> members_;
};

// Continuous image coordinates: x to the right, y down, origin at the top-left
// corner of pixel (0, 0). Pixel (i, j) covers [i, i+1) x [j, j+1).
struct Projection {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;
  bool in_front = false;
};

class Camera {
 public:
  static constexpr double kDefaultDistance = 2.2;
  static constexpr int kDefaultResolution = 800;
  static constexpr double kMinDepth = 1e-9;

  // Camera on the ray through `direction` at `distance` from the origin,
  // looking at the origin. `direction` is normalized here.
  Camera(const Vec3& direction, double distance = kDefaultDistance,
         int width = kDefaultResolution, int height = kDefaultResolution,
         std::optional<double> fov_y = std::nullopt);

  // Vertical field of view under which a unit sphere seen from `distance`
  // spans 90% of the image height.
  static double DefaultFovY(double distance);

  const Vec3& direction() const { return direction_; }
  double distance() const { return distance_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double fov_y() const { return fov_y_; }
  double focal_length() const { return focal_; }
  Vec3 position() const { return direction_ * distance_; }
  const Vec3& right() const { return right_; }
  const Vec3& up() const { return up_; }
  const Vec3& forward() const { return forward_; }

  Projection Project(const Vec3& p) const;
  Vec3 Unproject(double x, double y, double depth) const;

  // Pixel containing the projection, if the point is in front of the camera
  // and inside the image.
  std::optional<std::pair<int, int>> PixelOf(const Projection& proj) const;

  bool operator==(const Camera& other) const;

 private:
  Vec3 direction_;
  double distance_;
  int width_;
  int height_;
  double fov_y_;
  double focal_;
  Vec3 right_;
  Vec3 up_;
  Vec3 forward_;
};

// k cameras on a Fibonacci lattice of the view sphere, all looking at the
// origin. Deterministic in k. Throws liftseg::Error when k < 1.
std::vector<Camera> FixedViewpoints(int k,
                                    double distance = Camera::kDefaultDistance,
                                    int width = Camera::kDefaultResolution,
                                    int height = Camera::kDefaultResolution);

// Per-view, per-point visibility indicator.
class VisibilityMap {
 public:
  VisibilityMap() = default;
  VisibilityMap(int num_views, std::size_t num_points)
      : num_views_(num_views),
        num_points_(num_points),
        bits_(static_cast<std::size_t>(num_views) * num_points, 0) {}

  int num_views() const { return num_views_; }
  std::size_t num_points() const { return num_points_; }
  bool visible(int view, std::size_t point) const {
    return bits_[Index(view, point)] != 0;
  }
  void set(int view, std::size_t point, bool value) {
    bits_[Index(view, point)] = value ? 1 : 0;
  }
  std::span<const std::uint8_t> view(int k) const {
    return std::span<const std::uint8_t>(bits_).subspan(
        static_cast<std::size_t>(k) * num_points_, num_points_);
  }
  std::span<std::uint8_t> mutable_view(int k) {
    return std::span<std::uint8_t>(bits_).subspan(
        static_cast<std::size_t>(k) * num_points_, num_points_);
  }
  std::size_t CountVisible(int view) const;

  bool operator==(const VisibilityMap& other) const = default;

 private:
  std::size_t Index(int view, std::size_t point) const {
    return static_cast<std::size_t>(view) * num_points_ + point;
  }

  int num_views_ = 0;
  std::size_t num_points_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct VisibilityOptions {
  double splat_radius_px = 2.0;
  double depth_epsilon = 0.01;
  int threads = 1;
};

// Depth buffer of one view after splatting every in-front point as a disk of
// the given pixel radius. `owner` holds the index of the point that wrote the
// minimum depth (or -1).
struct SplatBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<int> owner;

  double DepthAt(int x, int y) const {
    return depth[static_cast<std::size_t>(y) * width + x];
  }
  int OwnerAt(int x, int y) const {
    return owner[static_cast<std::size_t>(y) * width + x];
  }
};

SplatBuffer Splat(const PointCloud& cloud, const Camera& camera,
                  double splat_radius_px);

// V_k(p) = 1 iff p is in front of camera k, inside its image, and its depth
// is at most the splatted minimum depth at its pixel plus depth_epsilon.
VisibilityMap ComputeVisibility(const PointCloud& cloud,
                                std::span<const Camera> cameras,
                                const VisibilityOptions& options = {});

// Uniform hash grid for radius queries.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, double cell_size);

  // Calls fn(index) for every point strictly closer than `radius` to q.
  template <typename Fn>
  void ForEachWithin(const Vec3& q, double radius, Fn&& fn) const;

  double cell_size() const { return cell_; }

 private:
  struct Key {
    long long x, y, z;
  };
  Key KeyOf(const Vec3& p) const;
  std::span<const int> Cell(long long x, long long y, long long z) const;

  std::span<const Vec3> points_;
  double cell_;
  Vec3 origin_;
  long long nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<long long> keys_;  // sorted linear cell keys
  std::vector<int> indices_;     // point index per entry of keys_
};

template <typename Fn>
void PointGrid::ForEachWithin(const Vec3& q, double radius, Fn&& fn) const {
  const long long reach = static_cast<long long>(std::ceil(radius / cell_));
  const Key c = KeyOf(q);
  const double r2 = radius * radius;
  for (long long z = c.z - reach; z <= c.z + reach; ++z) {
    for (long long y = c.y - reach; y <= c.y + reach; ++y) {
      for (long long x = c.x - reach; x <= c.x + reach; ++x) {
        for (int idx : Cell(x, y, z)) {
          if ((points_[idx] - q).squaredNorm() < r2) fn(idx);
        }
      }
    }
  }
}

// Mean distance from each point to its nearest other point. Zero for a
// single-point cloud.
double MeanNearestNeighborDistance(const PointCloud& cloud);

}  // namespace liftseg::geom

#endif  // LIFTSEG_GEOM_H_
