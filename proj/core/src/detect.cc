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

#include "liftseg/detect.h"

#include <algorithm>
#include <cmath>

#include "io_util.h"
#include "liftseg/error.h"
#include "liftseg/parallel.h"
#include "liftseg/rle.h"

namespace liftseg::detect {
namespace {

using nlohmann::json;

std::string Where(std::size_t i) { return "detection " + std::to_string(i) + ": "; }

}  // namespace

PixelWindow CropWindow(const Box& box) {
  PixelWindow w;
  w.x = static_cast<int>(std::floor(box.x0));
  w.y = static_cast<int>(std::floor(box.y0));
  w.width = static_cast<int>(std::ceil(box.x1)) - w.x;
  w.height = static_cast<int>(std::ceil(box.y1)) - w.y;
  return w;
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 0 || height < 0) throw Error("mask dimensions must be non-negative");
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw Error("mask bitmap has " + std::to_string(bits_.size()) + " pixels, expected " +
                std::to_string(static_cast<std::size_t>(width) * height));
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

Mask Mask::FromRle(int width, int height, std::span<const int> runs) {
  if (width < 0 || height < 0) throw Error("mask dimensions must be non-negative");
  return Mask(width, height,
              DecodeRle(runs, static_cast<std::size_t>(width) * height));
}

std::vector<int> Mask::ToRle() const { return EncodeRle(bits_); }

std::size_t Mask::CountSet() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

void DetectionSet::Validate() const {
  if (num_views < 1) throw Error("detection set needs K >= 1");
  if (num_labels < 1) throw Error("detection set needs L >= 1");
  if (feature_dim < 0) throw Error("feature dimension must be non-negative");
  if (static_cast<int>(labels.size()) != num_labels) {
    throw Error("label table has " + std::to_string(labels.size()) +
                " names but L=" + std::to_string(num_labels));
  }
  if (image_width < 1 || image_height < 1) throw Error("image size must be positive");
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    if (d.view < 0 || d.view >= num_views) {
      throw Error(Where(i) + "view " + std::to_string(d.view) + " outside [0, K)");
    }
    if (d.label < 0 || d.label >= num_labels) {
      throw Error(Where(i) + "label " + std::to_string(d.label) + " outside [0, L)");
    }
    const Box& b = d.box;
    if (!std::isfinite(b.x0) || !std::isfinite(b.y0) || !std::isfinite(b.x1) ||
        !std::isfinite(b.y1)) {
      throw Error(Where(i) + "box has a non-finite coordinate");
    }
    if (!(b.x0 < b.x1) || !(b.y0 < b.y1)) {
      throw Error(Where(i) + "box requires x0 < x1 and y0 < y1");
    }
    if (b.x0 < 0.0 || b.y0 < 0.0 || b.x1 > image_width || b.y1 > image_height) {
      throw Error(Where(i) + "box extends outside the image");
    }
    if (static_cast<int>(d.feature.size()) != feature_dim) {
      throw Error(Where(i) + "feature has dimension " + std::to_string(d.feature.size()) +
                  ", expected D=" + std::to_string(feature_dim));
    }
    for (float f : d.feature) {
      if (!std::isfinite(f)) throw Error(Where(i) + "feature has a non-finite entry");
    }
    if (!(d.confidence >= 0.0f && d.confidence <= 1.0f)) {
      throw Error(Where(i) + "confidence outside [0, 1]");
    }
    if (d.mask) {
      const PixelWindow w = CropWindow(b);
      if (d.mask->width() != w.width || d.mask->height() != w.height) {
        throw Error(Where(i) + "mask is " + std::to_string(d.mask->width()) + "x" +
                    std::to_string(d.mask->height()) + ", box crop window is " +
                    std::to_string(w.width) + "x" + std::to_string(w.height));
      }
    }
  }
}

MembershipTensor::MembershipTensor(std::size_t num_points,
                                   std::vector<std::vector<int>> members)
    : num_points_(num_points), members_(std::move(members)) {
  for (auto& m : members_) {
    if (!std::is_sorted(m.begin(), m.end())) std::sort(m.begin(), m.end());
  }
}

bool MembershipTensor::contains(std::size_t detection, int point) const {
  const auto& m = members_[detection];
  return std::binary_search(m.begin(), m.end(), point);
}

MembershipTensor ComputeMembership(const geom::PointCloud& cloud,
                                   std::span<const geom::Camera> cameras,
                                   const DetectionSet& detections,
                                   MembershipMode mode, int threads) {
  detections.Validate();
  if (static_cast<int>(cameras.size()) != detections.num_views) {
    throw Error("detection set has K=" + std::to_string(detections.num_views) + " views but " +
                std::to_string(cameras.size()) + " cameras were given");
  }
  for (const auto& cam : cameras) {
    if (cam.width() != detections.image_width || cam.height() != detections.image_height) {
      throw Error("camera image size does not match the detection set's image size");
    }
  }
  if (mode == MembershipMode::kMask) {
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (!detections.detections[i].mask) {
        throw Error(Where(i) + "mask membership requested but the detection has no mask");
      }
    }
  }

  // Projections are shared by every detection of a view.
  std::vector<std::vector<geom::Projection>> projections(cameras.size());
  ParallelFor(cameras.size(), threads, [&](std::size_t k) {
    auto& proj = projections[k];
    proj.resize(cloud.size());
    for (std::size_t p = 0; p < cloud.size(); ++p) proj[p] = cameras[k].Project(cloud[p]);
  });

  std::vector<std::vector<int>> members(detections.size());
  ParallelFor(detections.size(), threads, [&](std::size_t i) {
    const Detection& d = detections.detections[i];
    const PixelWindow window = CropWindow(d.box);
    const auto& proj = projections[d.view];
    auto& out = members[i];
    for (std::size_t p = 0; p < cloud.size(); ++p) {
      const geom::Projection& pr = proj[p];
      if (!pr.in_front || !d.box.Contains(pr.x, pr.y)) continue;
      if (mode == MembershipMode::kMask) {
        const int col = static_cast<int>(std::floor(pr.x)) - window.x;
        const int row = static_cast<int>(std::floor(pr.y)) - window.y;
        if (!d.mask->at(col, row)) continue;
      }
      out.push_back(static_cast<int>(p));
    }
  });
  return MembershipTensor(cloud.size(), std::move(members));
}

DetectionSet LoadDetections(const std::string& path) {
  const json j = io::ParseJsonFile(path);
  DetectionSet set;
  std::string field = "<root>";
  try {
    field = "version";
    if (j.at("version").get<int>() != 1) throw ParseError(path, 0, "unsupported version");
    field = "K";
    set.num_views = j.at("K").get<int>();
    field = "L";
    set.num_labels = j.at("L").get<int>();
    field = "D";
    set.feature_dim = j.at("D").get<int>();
    field = "labels";
    set.labels = j.at("labels").get<std::vector<std::string>>();
    field = "width";
    if (j.contains("width")) set.image_width = j.at("width").get<int>();
    field = "height";
    if (j.contains("height")) set.image_height = j.at("height").get<int>();
    const json& dets = j.at("detections");
    if (!dets.is_array()) throw ParseError(path, 0, "detections: expected an array");
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const json& d = dets[i];
      const std::string at = "detections[" + std::to_string(i) + "].";
      Detection det;
      field = at + "k";
      det.view = d.at("k").get<int>();
      field = at + "j";
      det.label = d.at("j").get<int>();
      field = at + "box";
      const auto box = d.at("box").get<std::vector<double>>();
      if (box.size() != 4) throw ParseError(path, 0, field + ": expected 4 numbers");
      det.box = {box[0], box[1], box[2], box[3]};
      field = at + "conf";
      det.confidence = static_cast<float>(d.at("conf").get<double>());
      field = at + "feature";
      for (const json& f : d.at("feature")) det.feature.push_back(static_cast<float>(f.get<double>()));
      field = at + "mask_rle";
      if (d.contains("mask_rle") && !d.at("mask_rle").is_null()) {
        const json& m = d.at("mask_rle");
        const auto runs = m.at("runs").get<std::vector<int>>();
        det.mask = Mask::FromRle(m.at("w").get<int>(), m.at("h").get<int>(), runs);
      }
      set.detections.push_back(std::move(det));
    }
    field = "<root>";
    set.Validate();
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, field + ": " + e.what());
  } catch (const Error& e) {
    throw ParseError(path, 0, field == "<root>" ? e.what() : field + ": " + e.what());
  }
  return set;
}

void SaveDetections(const DetectionSet& set, const std::string& path) {
  set.Validate();
  json j;
  j["version"] = 1;
  j["K"] = set.num_views;
  j["L"] = set.num_labels;
  j["D"] = set.feature_dim;
  j["labels"] = set.labels;
  j["width"] = set.image_width;
  j["height"] = set.image_height;
  json dets = json::array();
  for (const Detection& d : set.detections) {
    json feature = json::array();
    for (float f : d.feature) feature.push_back(io::FloatForJson(f));
    json det = {{"k", d.view},
                {"j", d.label},
                {"box", {d.box.x0, d.box.y0, d.box.x1, d.box.y1}},
                {"conf", io::FloatForJson(d.confidence)},
                {"feature", std::move(feature)}};
    if (d.mask) {
      det["mask_rle"] = {{"w", d.mask->width()}, {"h", d.mask->height()}, {"runs", d.mask->ToRle()}};
    } else {
      det["mask_rle"] = nullptr;
    }
    dets.push_back(std::move(det));
  }
  j["detections"] = std::move(dets);
  io::WriteFile(path, j.dump() + "\n");
}

}  // namespace liftseg::detect
