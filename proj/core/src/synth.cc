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
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "io_util.h"
#include "liftseg/error.h"
#include "liftseg/instance.h"
#include "liftseg/kv_config.h"

namespace liftseg::synth {
namespace {

using geom::Vec3;

// Independent generator per purpose so one stage's draws never shift another's.
std::mt19937_64 Stream(std::uint64_t seed, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

enum Purpose : std::uint64_t { kGeometry = 1, kSuperpoints = 2, kDetections = 3, kFeatures = 4 };

Vec3 SampleSurface(const PartSpec& part, const std::array<double, 3>& size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> s(-1.0, 1.0);
  Vec3 local = Vec3::Zero();
  switch (part.shape) {
    case Shape::kBox: {
      const double a = size[0], b = size[1], c = size[2];
      const double areas[3] = {b * c, a * c, a * b};
      const double pick = u(rng) * (areas[0] + areas[1] + areas[2]);
      const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
      const double p = s(rng), q = s(rng);
      if (pick < areas[0]) {
        local = Vec3(sign * a, p * b, q * c);
      } else if (pick < areas[0] + areas[1]) {
        local = Vec3(p * a, sign * b, q * c);
      } else {
        local = Vec3(p * a, q * b, sign * c);
      }
      break;
    }
    case Shape::kSphere: {
      std::normal_distribution<double> g(0.0, 1.0);
      Vec3 d(g(rng), g(rng), g(rng));
      while (d.squaredNorm() < 1e-12) d = Vec3(g(rng), g(rng), g(rng));
      local = d.normalized() * size[0];
      break;
    }
    case Shape::kCylinder: {
      const double r = size[0], h = size[1];
      const double side = 2.0 * std::numbers::pi * r * 2.0 * h;
      const double cap = part.caps ? std::numbers::pi * r * r : 0.0;
      const double pick = u(rng) * (side + 2.0 * cap);
      const double theta = 2.0 * std::numbers::pi * u(rng);
      if (pick < side) {
        local = Vec3(r * std::cos(theta), r * std::sin(theta), s(rng) * h);
      } else {
        const double rho = r * std::sqrt(u(rng));
        const double z = pick < side + cap ? h : -h;
        local = Vec3(rho * std::cos(theta), rho * std::sin(theta), z);
      }
      break;
    }
  }
  const double yaw = part.yaw_degrees * std::numbers::pi / 180.0;
  const double c = std::cos(yaw), sn = std::sin(yaw);
  return Vec3(c * local.x() - sn * local.y() + part.center[0],
              sn * local.x() + c * local.y() + part.center[1], local.z() + part.center[2]);
}

// Farthest-point seeds followed by nearest-seed assignment within `points`.
void GrowSuperpoints(const geom::PointCloud& cloud, const std::vector<int>& points,
                     int target_size, std::mt19937_64& rng, std::vector<int>& assignment,
                     int& next_id) {
  if (points.empty()) return;
  const int n = static_cast<int>(points.size());
  const int k = std::clamp(static_cast<int>(std::lround(static_cast<double>(n) / target_size)), 1, n);
  std::vector<int> seeds;
  seeds.push_back(points[std::uniform_int_distribution<int>(0, n - 1)(rng)]);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(seeds.size()) < k) {
    const Vec3& last = cloud[seeds.back()];
    int far = 0;
    for (int i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], (cloud[points[i]] - last).squaredNorm());
      if (dist[i] > dist[far]) far = i;
    }
    seeds.push_back(points[far]);
  }
  std::vector<int> local(n);
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int s = 0; s < k; ++s) {
      const double d = (cloud[points[i]] - cloud[seeds[s]]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    local[i] = best;
    ++counts[best];
  }
  std::vector<int> remap(k, -1);
  for (int s = 0; s < k; ++s) {
    if (counts[s] > 0) remap[s] = next_id++;
  }
  for (int i = 0; i < n; ++i) assignment[points[i]] = remap[local[i]];
}

double AutoSplatRadius(const geom::PointCloud& cloud, const geom::Camera& cam) {
  const double nn = geom::MeanNearestNeighborDistance(cloud);
  return std::clamp(cam.focal_length() * nn / cam.distance(), 2.0, 40.0);
}

void ClampBox(detect::Box& b, int width, int height) {
  b.x0 = std::clamp(b.x0, 0.0, static_cast<double>(width - 1));
  b.y0 = std::clamp(b.y0, 0.0, static_cast<double>(height - 1));
  b.x1 = std::clamp(b.x1, b.x0 + 1.0, static_cast<double>(width));
  b.y1 = std::clamp(b.y1, b.y0 + 1.0, static_cast<double>(height));
}

std::array<double, 3> ParseTriple(const KvSection& s, const std::string& key,
                                  std::array<double, 3> fallback, const std::string& source) {
  const auto v = s.GetDoubles(key);
  if (!v) return fallback;
  if (v->empty() || v->size() > 3) {
    throw ParseError(source, 0, "'" + key + "' takes one to three numbers");
  }
  std::array<double, 3> out = fallback;
  for (std::size_t i = 0; i < v->size(); ++i) out[i] = (*v)[i];
  return out;
}

}  // namespace

void SynthSpec::Validate() const {
  if (parts.empty()) throw Error("infeasible spec: no parts");
  long long total = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const PartSpec& p = parts[i];
    const std::string where = "part " + std::to_string(i) + " (" + p.label + ")";
    if (p.label.empty()) throw Error(where + ": empty label");
    if (p.points < 0) throw Error(where + ": negative point count");
    for (double s : p.size) {
      if (!(s > 0.0) || !std::isfinite(s)) throw Error(where + ": sizes must be positive");
    }
    total += p.points;
  }
  if (total == 0) throw Error("infeasible spec: zero points");
  const auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(std::string(name) + " must lie in [0, 1]");
  };
  rate(noise.drop_rate, "drop_rate");
  rate(noise.spurious_rate, "spurious_rate");
  if (!(noise.jitter_px >= 0.0)) throw Error("jitter_px must be >= 0");
  if (!(noise.box_pad_px >= 0.0)) throw Error("box_pad_px must be >= 0");
  if (noise.feature_dim < 2) throw Error("feature_dim must be >= 2");
  if (!(noise.snr > 0.0)) throw Error("snr must be positive");
  if (views < 1) throw Error("views must be >= 1");
  if (!(distance > 1.0)) throw Error("distance must exceed the unit sphere radius");
  if (resolution < 8) throw Error("resolution must be >= 8");
  if (!(splat_radius_px >= 0.0)) throw Error("splat_radius_px must be >= 0");
  if (!(depth_epsilon >= 0.0)) throw Error("depth_epsilon must be >= 0");
  if (superpoint_size < 1) throw Error("superpoint_size must be >= 1");
  if (!(size_jitter >= 0.0 && size_jitter < 1.0)) throw Error("size_jitter must lie in [0, 1)");
}

std::vector<std::string> PresetNames() { return {"chair", "lamp", "table"}; }

SynthSpec Preset(const std::string& name) {
  SynthSpec spec;
  spec.category = name;
  auto add = [&](std::string label, Shape shape, std::array<double, 3> center,
                 std::array<double, 3> size, int points, bool caps = true) {
    PartSpec p;
    p.label = std::move(label);
    p.shape = shape;
    p.center = center;
    p.size = size;
    p.points = points;
    p.caps = caps;
    spec.parts.push_back(std::move(p));
  };
  if (name == "chair") {
    add("seat", Shape::kBox, {0.0, 0.0, 0.0}, {0.5, 0.5, 0.06}, 700);
    add("back", Shape::kBox, {0.0, -0.44, 0.56}, {0.5, 0.06, 0.5}, 700);
    for (double x : {-0.42, 0.42}) {
      for (double y : {-0.42, 0.42}) {
        add("leg", Shape::kCylinder, {x, y, -0.51}, {0.05, 0.45, 0.0}, 150, false);
      }
    }
  } else if (name == "table") {
    add("top", Shape::kBox, {0.0, 0.0, 0.4}, {0.75, 0.5, 0.05}, 900);
    add("drawer", Shape::kBox, {0.3, 0.0, 0.22}, {0.3, 0.35, 0.1}, 400);
    for (double x : {-0.65, 0.65}) {
      for (double y : {-0.42, 0.42}) {
        add("leg", Shape::kCylinder, {x, y, -0.17}, {0.05, 0.52, 0.0}, 150, false);
      }
    }
  } else if (name == "lamp") {
    add("base", Shape::kCylinder, {0.0, 0.0, -0.8}, {0.35, 0.05, 0.0}, 450);
    add("pole", Shape::kCylinder, {0.0, 0.0, -0.2}, {0.04, 0.55, 0.0}, 300, false);
    add("shade", Shape::kSphere, {0.0, 0.0, 0.55}, {0.3, 0.0, 0.0}, 800);
  } else {
    throw Error("unknown preset '" + name + "'");
  }
  for (auto& p : spec.parts) {
    for (double& s : p.size) {
      if (s == 0.0) s = 1.0;
    }
  }
  return spec;
}

SynthSpec ParseSynthSpec(const std::string& text, const std::string& source) {
  const KvDocument doc = ParseKv(text, source);
  const KvSection& root = doc.root();
  root.RequireKnownKeys({"seed", "preset", "category", "views", "distance", "resolution",
                         "splat_radius_px", "depth_epsilon", "superpoint_size",
                         "cross_boundaries", "size_jitter", "masks", "drop_rate",
                         "spurious_rate", "jitter_px", "box_pad_px", "feature_dim", "snr",
                         "confidence"});
  SynthSpec spec;
  if (auto v = root.GetString("preset")) {
    try {
      spec = Preset(*v);
    } catch (const Error& e) {
      throw ParseError(source, 0, e.what());
    }
  }
  if (auto v = root.GetInt("seed")) spec.seed = static_cast<std::uint64_t>(*v);
  if (auto v = root.GetString("category")) spec.category = *v;
  if (auto v = root.GetInt("views")) spec.views = static_cast<int>(*v);
  if (auto v = root.GetDouble("distance")) spec.distance = *v;
  if (auto v = root.GetInt("resolution")) spec.resolution = static_cast<int>(*v);
  if (auto v = root.GetDouble("splat_radius_px")) spec.splat_radius_px = *v;
  if (auto v = root.GetDouble("depth_epsilon")) spec.depth_epsilon = *v;
  if (auto v = root.GetInt("superpoint_size")) spec.superpoint_size = static_cast<int>(*v);
  if (auto v = root.GetBool("cross_boundaries")) spec.cross_boundaries = *v;
  if (auto v = root.GetDouble("size_jitter")) spec.size_jitter = *v;
  if (auto v = root.GetBool("masks")) spec.masks = *v;
  if (auto v = root.GetDouble("drop_rate")) spec.noise.drop_rate = *v;
  if (auto v = root.GetDouble("spurious_rate")) spec.noise.spurious_rate = *v;
  if (auto v = root.GetDouble("jitter_px")) spec.noise.jitter_px = *v;
  if (auto v = root.GetDouble("box_pad_px")) spec.noise.box_pad_px = *v;
  if (auto v = root.GetInt("feature_dim")) spec.noise.feature_dim = static_cast<int>(*v);
  if (auto v = root.GetDouble("snr")) spec.noise.snr = *v;
  if (auto v = root.GetString("confidence")) {
    if (*v == "normal") spec.noise.confidence = ConfidenceModel::kNormal;
    else if (*v == "adversarial") spec.noise.confidence = ConfidenceModel::kAdversarial;
    else throw ParseError(source, 0, "confidence must be normal or adversarial");
  }

  bool replaced = false;
  for (std::size_t i = 1; i < doc.sections.size(); ++i) {
    const KvSection& s = doc.sections[i];
    if (s.name() != "part") {
      throw ParseError(source, 0, "unknown section [" + s.name() + "]");
    }
    s.RequireKnownKeys({"label", "shape", "center", "size", "yaw", "points", "caps"});
    if (!replaced) {
      spec.parts.clear();
      replaced = true;
    }
    PartSpec p;
    const auto label = s.GetString("label");
    if (!label) throw ParseError(source, 0, "[part] needs a label");
    p.label = *label;
    if (auto v = s.GetString("shape")) {
      if (*v == "box") p.shape = Shape::kBox;
      else if (*v == "sphere") p.shape = Shape::kSphere;
      else if (*v == "cylinder") p.shape = Shape::kCylinder;
      else throw ParseError(source, 0, "shape must be box, sphere or cylinder");
    }
    p.center = ParseTriple(s, "center", p.center, source);
    p.size = ParseTriple(s, "size", p.size, source);
    if (auto v = s.GetDouble("yaw")) p.yaw_degrees = *v;
    if (auto v = s.GetInt("points")) p.points = static_cast<int>(*v);
    if (auto v = s.GetBool("caps")) p.caps = *v;
    spec.parts.push_back(std::move(p));
  }
  try {
    spec.Validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, 0, e.what());
  }
  return spec;
}

SynthSpec LoadSynthSpec(const std::string& path) {
  return ParseSynthSpec(io::ReadFile(path), path);
}

detect::Box TightBox(const std::vector<std::array<double, 2>>& pixels) {
  if (pixels.empty()) throw Error("tight box of an empty point set");
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& p : pixels) {
    x0 = std::min(x0, p[0]);
    y0 = std::min(y0, p[1]);
    x1 = std::max(x1, p[0]);
    y1 = std::max(y1, p[1]);
  }
  return {std::floor(x0), std::floor(y0), std::floor(x1) + 1.0, std::floor(y1) + 1.0};
}

SynthBundle Generate(const SynthSpec& spec) {
  spec.Validate();
  SynthBundle bundle;
  bundle.seed = spec.seed;

  // Labels in order of first appearance.
  std::vector<std::string> labels;
  std::vector<int> part_label(spec.parts.size());
  for (std::size_t q = 0; q < spec.parts.size(); ++q) {
    auto it = std::find(labels.begin(), labels.end(), spec.parts[q].label);
    part_label[q] = static_cast<int>(it - labels.begin());
    if (it == labels.end()) labels.push_back(spec.parts[q].label);
  }
  const int num_labels = static_cast<int>(labels.size());

  // Geometry.
  auto geo_rng = Stream(spec.seed, kGeometry);
  std::uniform_real_distribution<double> jitter(-spec.size_jitter, spec.size_jitter);
  std::vector<Vec3> raw;
  std::vector<int> point_part;
  for (std::size_t q = 0; q < spec.parts.size(); ++q) {
    const PartSpec& part = spec.parts[q];
    std::array<double, 3> size = part.size;
    if (spec.size_jitter > 0.0) {
      for (double& s : size) s *= 1.0 + jitter(geo_rng);
    }
    for (int i = 0; i < part.points; ++i) {
      raw.push_back(SampleSurface(part, size, geo_rng));
      point_part.push_back(static_cast<int>(q));
    }
  }
  geom::NormalizedCloud normalized = geom::NormalizeCloud(raw);
  const geom::PointCloud& cloud = normalized.cloud;
  const std::size_t n = cloud.size();

  // Super points.
  auto sp_rng = Stream(spec.seed, kSuperpoints);
  std::vector<int> assignment(n, -1);
  int num_sp = 0;
  if (spec.cross_boundaries) {
    std::vector<int> all(n);
    for (std::size_t p = 0; p < n; ++p) all[p] = static_cast<int>(p);
    GrowSuperpoints(cloud, all, spec.superpoint_size, sp_rng, assignment, num_sp);
  } else {
    for (std::size_t q = 0; q < spec.parts.size(); ++q) {
      std::vector<int> members;
      for (std::size_t p = 0; p < n; ++p) {
        if (point_part[p] == static_cast<int>(q)) members.push_back(static_cast<int>(p));
      }
      GrowSuperpoints(cloud, members, spec.superpoint_size, sp_rng, assignment, num_sp);
    }
  }

  geom::Scene& scene = bundle.scene;
  scene.cloud = cloud;
  scene.partition = geom::SuperPointPartition(assignment, num_sp);
  scene.gt_labels.resize(n);
  for (std::size_t p = 0; p < n; ++p) scene.gt_labels[p] = part_label[point_part[p]];
  scene.label_names = labels;
  scene.category = spec.category;
  bundle.gt_instances = point_part;

  // Views and visibility.
  bundle.views.cameras =
      geom::FixedViewpoints(spec.views, spec.distance, spec.resolution, spec.resolution);
  bundle.views.options.splat_radius_px = spec.splat_radius_px > 0.0
                                             ? spec.splat_radius_px
                                             : AutoSplatRadius(cloud, bundle.views.cameras[0]);
  bundle.views.options.depth_epsilon = spec.depth_epsilon;
  bundle.visibility = geom::ComputeVisibility(cloud, bundle.views.cameras, bundle.views.options);

  // Detections.
  detect::DetectionSet& dets = bundle.detections;
  dets.num_views = spec.views;
  dets.num_labels = num_labels;
  dets.feature_dim = spec.noise.feature_dim;
  dets.labels = labels;
  dets.image_width = spec.resolution;
  dets.image_height = spec.resolution;

  auto det_rng = Stream(spec.seed, kDetections);
  auto feat_rng = Stream(spec.seed, kFeatures);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> side(-spec.noise.jitter_px, spec.noise.jitter_px);
  const double half_width = std::sqrt(3.0) / spec.noise.snr;
  std::uniform_real_distribution<double> signal_noise(-half_width, half_width);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int res = spec.resolution;

  auto make_feature = [&](bool truthful) {
    std::vector<float> f(spec.noise.feature_dim);
    f[0] = static_cast<float>((truthful ? 1.0 : -1.0) + signal_noise(feat_rng));
    for (int c = 1; c < spec.noise.feature_dim; ++c) f[c] = static_cast<float>(gauss(feat_rng));
    return f;
  };
  auto make_confidence = [&](bool truthful) {
    const bool high = truthful == (spec.noise.confidence == ConfidenceModel::kNormal);
    const double c = high ? 0.5 + 0.5 * unit(feat_rng) : 0.1 + 0.5 * unit(feat_rng);
    return static_cast<float>(c);
  };

  for (int k = 0; k < spec.views; ++k) {
    const geom::Camera& cam = bundle.views.cameras[k];
    const geom::SplatBuffer buffer = geom::Splat(cloud, cam, bundle.views.options.splat_radius_px);
    std::vector<std::vector<std::array<double, 2>>> visible(spec.parts.size());
    // Pixel -> part of a visible point in it; -2 when several parts share it.
    std::vector<int> pixel_part(static_cast<std::size_t>(res) * res, -1);
    for (std::size_t p = 0; p < n; ++p) {
      if (!bundle.visibility.visible(k, p)) continue;
      const geom::Projection proj = cam.Project(cloud[p]);
      visible[point_part[p]].push_back({proj.x, proj.y});
      const auto px = cam.PixelOf(proj);
      int& slot = pixel_part[static_cast<std::size_t>(px->second) * res + px->first];
      slot = slot == -1 || slot == point_part[p] ? point_part[p] : -2;
    }
    for (std::size_t q = 0; q < spec.parts.size(); ++q) {
      if (visible[q].empty()) continue;
      detect::Box box = TightBox(visible[q]);
      const double pad = spec.noise.box_pad_px;
      box = {box.x0 - pad, box.y0 - pad, box.x1 + pad, box.y1 + pad};
      if (spec.noise.jitter_px > 0.0) {
        box.x0 += side(det_rng);
        box.y0 += side(det_rng);
        box.x1 += side(det_rng);
        box.y1 += side(det_rng);
      }
      ClampBox(box, res, res);

      std::optional<detect::Mask> mask;
      if (spec.masks) {
        const detect::PixelWindow win = detect::CropWindow(box);
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(win.width) * win.height, 0);
        for (int r = 0; r < win.height; ++r) {
          for (int c = 0; c < win.width; ++c) {
            const int x = win.x + c, y = win.y + r;
            if (x < 0 || y < 0 || x >= res || y >= res) continue;
            const int here = pixel_part[static_cast<std::size_t>(y) * res + x];
            const int owner = buffer.OwnerAt(x, y);
            const bool own_point = here == static_cast<int>(q) || here == -2;
            const bool own_fill = here == -1 && owner >= 0 && point_part[owner] == static_cast<int>(q);
            bits[static_cast<std::size_t>(r) * win.width + c] = own_point || own_fill ? 1 : 0;
          }
        }
        mask = detect::Mask(win.width, win.height, std::move(bits));
      }

      const int label = part_label[q];
      const bool drop_truthful = unit(det_rng) < spec.noise.drop_rate;
      const bool add_spurious = num_labels > 1 && unit(det_rng) < spec.noise.spurious_rate;
      int wrong = label;
      bool drop_spurious = false;
      if (add_spurious) {
        wrong = std::uniform_int_distribution<int>(0, num_labels - 2)(det_rng);
        if (wrong >= label) ++wrong;
        drop_spurious = unit(det_rng) < spec.noise.drop_rate;
      }
      if (!drop_truthful) {
        dets.detections.push_back({k, label, box, mask, make_feature(true), make_confidence(true)});
        bundle.truthful.push_back(1);
      }
      if (add_spurious && !drop_spurious) {
        dets.detections.push_back({k, wrong, box, mask, make_feature(false), make_confidence(false)});
        bundle.truthful.push_back(0);
      }
    }
  }
  dets.Validate();
  return bundle;
}

void Emit(const SynthBundle& bundle, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create bundle directory " + dir + (ec ? ": " + ec.message() : ""));
  }
  const fs::path root(dir);
  geom::SaveScene(bundle.scene, (root / "cloud.txt").string(), (root / "labels.json").string());
  geom::WriteViewSet((root / "cameras.json").string(), bundle.views);
  geom::WriteVisibility((root / "visibility.txt").string(), bundle.visibility);
  detect::SaveDetections(bundle.detections, (root / "detections.json").string());

  nlohmann::json truth = {{"version", 1}, {"seed", bundle.seed}, {"truthful", nlohmann::json::array()}};
  for (std::uint8_t t : bundle.truthful) truth["truthful"].push_back(t != 0);
  io::WriteJsonFile((root / "truth.json").string(), truth);

  instance::InstanceFile inst;
  inst.point_instance = bundle.gt_instances;
  inst.point_label = bundle.scene.gt_labels;
  int count = 0;
  for (int id : bundle.gt_instances) count = std::max(count, id + 1);
  inst.labels.assign(count, 0);
  inst.scores.assign(count, 1.0);
  for (std::size_t p = 0; p < inst.point_instance.size(); ++p) {
    if (inst.point_instance[p] >= 0) inst.labels[inst.point_instance[p]] = inst.point_label[p];
  }
  instance::WriteInstances((root / "instances.txt").string(), inst);
}

SynthBundle LoadBundle(const std::string& dir) {
  const std::filesystem::path root(dir);
  SynthBundle bundle;
  bundle.scene = geom::LoadScene((root / "cloud.txt").string(), (root / "labels.json").string());
  bundle.views = geom::ReadViewSet((root / "cameras.json").string());
  bundle.visibility = geom::ReadVisibility((root / "visibility.txt").string());
  bundle.detections = detect::LoadDetections((root / "detections.json").string());

  const std::string truth_path = (root / "truth.json").string();
  const nlohmann::json truth = io::ParseJsonFile(truth_path);
  try {
    bundle.seed = truth.at("seed").get<std::uint64_t>();
    for (const auto& t : truth.at("truthful")) bundle.truthful.push_back(t.get<bool>() ? 1 : 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(truth_path, 0, e.what());
  }
  if (bundle.truthful.size() != bundle.detections.size()) {
    throw ParseError(truth_path, 0, "truth flags do not match the detection count");
  }
  const auto inst = instance::ReadInstances((root / "instances.txt").string(),
                                            bundle.scene.cloud.size());
  bundle.gt_instances = inst.point_instance;
  return bundle;
}

}  // namespace liftseg::synth
