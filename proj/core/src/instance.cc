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

#include "liftseg/instance.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "io_util.h"
#include "liftseg/error.h"

namespace liftseg::instance {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

double Mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

bool Adjacency::adjacent(int a, int b) const {
  const auto& n = neighbors[a];
  return std::binary_search(n.begin(), n.end(), b);
}

std::vector<std::pair<int, int>> Adjacency::Edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < num_superpoints(); ++a) {
    for (int b : neighbors[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

Adjacency SuperpointAdjacency(const geom::PointCloud& cloud,
                              const geom::SuperPointPartition& partition, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error("adjacency radius must be positive and finite");
  }
  if (partition.num_points() != cloud.size()) {
    throw Error("partition covers " + std::to_string(partition.num_points()) +
                " points, cloud has " + std::to_string(cloud.size()));
  }
  const int s = partition.num_superpoints();
  std::vector<std::vector<int>> sets(s);
  const geom::PointGrid grid(cloud.points(), radius);
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const int a = partition.superpoint_of(p);
    grid.ForEachWithin(cloud[p], radius, [&](int q) {
      const int b = partition.superpoint_of(q);
      if (b != a) sets[a].push_back(b);
    });
  }
  Adjacency adj;
  adj.neighbors.resize(s);
  for (int a = 0; a < s; ++a) {
    auto& n = sets[a];
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
    adj.neighbors[a] = std::move(n);
  }
  return adj;
}

double DefaultAdjacencyRadius(const geom::PointCloud& cloud) {
  const double d = geom::MeanNearestNeighborDistance(cloud);
  return d > 0.0 ? 2.0 * d : 1.0;
}

InclusionPatterns ComputeInclusion(const vote::VoteInputs& in, double threshold) {
  const auto& part = in.partition;
  const std::size_t num_dets = in.detections.size();
  if (in.membership.num_detections() != num_dets) {
    throw Error("membership does not match the detection set");
  }
  InclusionPatterns out(part.num_superpoints(), std::vector<std::uint8_t>(num_dets, kExcluded));
  std::vector<std::uint8_t> member(part.num_points(), 0);
  for (std::size_t b = 0; b < num_dets; ++b) {
    for (int p : in.membership.members(b)) member[p] = 1;
    const int view = in.detections.detections[b].view;
    for (int i = 0; i < part.num_superpoints(); ++i) {
      int visible = 0;
      int inside = 0;
      for (int p : part.members(i)) {
        if (!in.visibility.visible(view, p)) continue;
        ++visible;
        inside += member[p];
      }
      if (visible == 0) {
        out[i][b] = kUndetermined;
      } else {
        out[i][b] = inside >= threshold * visible ? kIncluded : kExcluded;
      }
    }
    for (int p : in.membership.members(b)) member[p] = 0;
  }
  return out;
}

std::vector<int> InstanceSegmentation::PointInstances(
    const geom::SuperPointPartition& partition) const {
  std::vector<int> out(partition.num_points());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = superpoint_instance[partition.superpoint_of(p)];
  }
  return out;
}

void RestrictToOwnLabel(const detect::DetectionSet& detections,
                        std::span<const int> superpoint_labels, InclusionPatterns* patterns) {
  if (patterns->size() != superpoint_labels.size()) {
    throw Error("inclusion patterns do not match the labeling");
  }
  for (std::size_t i = 0; i < patterns->size(); ++i) {
    auto& row = (*patterns)[i];
    if (row.size() != detections.size()) throw Error("inclusion patterns do not match the detections");
    for (std::size_t b = 0; b < row.size(); ++b) {
      if (detections.detections[b].label != superpoint_labels[i]) row[b] = kUndetermined;
    }
  }
}

bool CompatiblePatterns(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw Error("inclusion patterns differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != kUndetermined && b[i] != kUndetermined && a[i] != b[i]) return false;
  }
  return true;
}

InstanceSegmentation MergeInstances(std::span<const int> superpoint_labels,
                                    std::span<const std::pair<int, int>> edges,
                                    const InclusionPatterns& patterns) {
  const int s = static_cast<int>(superpoint_labels.size());
  if (static_cast<int>(patterns.size()) != s) {
    throw Error("inclusion patterns do not match the labeling");
  }
  DisjointSets sets(s);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= s || b >= s) throw Error("edge references an unknown super point");
    const int la = superpoint_labels[a];
    if (la == vote::kNullLabel || la != superpoint_labels[b]) continue;
    if (!CompatiblePatterns(patterns[a], patterns[b])) continue;
    sets.Union(a, b);
  }
  InstanceSegmentation seg;
  seg.superpoint_instance.assign(s, -1);
  std::vector<int> root_id(s, -1);
  for (int i = 0; i < s; ++i) {
    if (superpoint_labels[i] == vote::kNullLabel) continue;
    const int r = sets.Find(i);
    if (root_id[r] < 0) {
      root_id[r] = seg.num_instances();
      seg.instance_labels.push_back(superpoint_labels[i]);
      seg.instance_scores.push_back(0.0);
    }
    seg.superpoint_instance[i] = root_id[r];
  }
  return seg;
}

InstanceSegmentation MergeInstances(std::span<const int> superpoint_labels,
                                    const Adjacency& adjacency,
                                    const InclusionPatterns& patterns) {
  if (adjacency.num_superpoints() != static_cast<int>(superpoint_labels.size())) {
    throw Error("adjacency does not match the labeling");
  }
  const auto edges = adjacency.Edges();
  return MergeInstances(superpoint_labels, edges, patterns);
}

void AssignScores(const vote::ScoreMatrix& scores, InstanceSegmentation* seg) {
  const int n = seg->num_instances();
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < seg->superpoint_instance.size(); ++i) {
    const int id = seg->superpoint_instance[i];
    if (id < 0) continue;
    sum[id] += scores.values(static_cast<Eigen::Index>(i), seg->instance_labels[id]);
    ++count[id];
  }
  for (int id = 0; id < n; ++id) {
    seg->instance_scores[id] = count[id] ? sum[id] / count[id] : 0.0;
  }
}

std::vector<InstanceMask> MasksFromPoints(std::span<const int> point_instance,
                                          std::span<const int> point_label,
                                          std::span<const double> scores) {
  if (point_instance.size() != point_label.size()) {
    throw Error("instance and label arrays differ in length");
  }
  int count = 0;
  for (int id : point_instance) count = std::max(count, id + 1);
  std::vector<InstanceMask> out(count);
  std::vector<bool> seen(count, false);
  for (std::size_t p = 0; p < point_instance.size(); ++p) {
    const int id = point_instance[p];
    if (id < 0) continue;
    if (seen[id] && out[id].label != point_label[p]) {
      throw Error("instance " + std::to_string(id) + " mixes labels");
    }
    seen[id] = true;
    out[id].label = point_label[p];
    out[id].points.push_back(static_cast<int>(p));
  }
  for (int id = 0; id < count; ++id) {
    if (!seen[id]) throw Error("instance ids are not contiguous: " + std::to_string(id) + " is empty");
    if (static_cast<std::size_t>(id) < scores.size()) out[id].score = scores[id];
  }
  return out;
}

double MaskIou(std::span<const int> a, std::span<const int> b) {
  std::size_t inter = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<double> AveragePrecision(std::span<const Tagged> predictions,
                                       std::span<const Tagged> ground_truth) {
  if (ground_truth.empty()) return std::nullopt;
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].mask->score > predictions[b].mask->score;
  });
  std::vector<bool> taken(ground_truth.size(), false);
  std::vector<bool> tp(order.size(), false);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Tagged& pred = predictions[order[r]];
    double best = kMatchIou;
    int best_gt = -1;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (taken[g] || ground_truth[g].object != pred.object) continue;
      const double iou = MaskIou(pred.mask->points, ground_truth[g].mask->points);
      if (iou > best || (iou == best && best_gt < 0)) {
        best = iou;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0) {
      taken[best_gt] = true;
      tp[r] = true;
    }
  }
  const double npos = static_cast<double>(ground_truth.size());
  std::vector<double> precision(order.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    hits += tp[r] ? 1 : 0;
    precision[r] = static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  for (std::size_t r = order.size(); r-- > 1;) {
    precision[r - 1] = std::max(precision[r - 1], precision[r]);
  }
  double ap = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (tp[r]) ap += precision[r] / npos;
  }
  return ap;
}

ApResult EvaluateInstances(std::span<const InstanceObject> objects) {
  std::map<std::string, std::vector<std::size_t>> by_category;
  for (std::size_t i = 0; i < objects.size(); ++i) by_category[objects[i].category].push_back(i);

  ApResult result;
  std::vector<double> aware_means;
  std::vector<double> agnostic_means;
  for (const auto& [name, members] : by_category) {
    CategoryAp cat;
    cat.name = name;
    cat.parts = objects[members.front()].label_names;
    cat.num_objects = static_cast<int>(members.size());
    std::vector<Tagged> all_pred;
    std::vector<Tagged> all_gt;
    for (std::size_t idx : members) {
      const InstanceObject& obj = objects[idx];
      if (obj.label_names != cat.parts) {
        throw Error("objects of category '" + name + "' disagree on their part names");
      }
      const int tag = static_cast<int>(idx);
      for (const auto& m : obj.predicted) all_pred.push_back({tag, &m});
      for (const auto& m : obj.ground_truth) all_gt.push_back({tag, &m});
    }
    std::vector<double> part_values;
    for (int j = 0; j < static_cast<int>(cat.parts.size()); ++j) {
      std::vector<Tagged> pred;
      std::vector<Tagged> gt;
      for (const Tagged& t : all_pred) {
        if (t.mask->label == j) pred.push_back(t);
      }
      for (const Tagged& t : all_gt) {
        if (t.mask->label == j) gt.push_back(t);
      }
      const auto ap = AveragePrecision(pred, gt);
      cat.part_ap.push_back(ap);
      if (ap) part_values.push_back(*ap);
    }
    if (!part_values.empty()) {
      cat.part_aware = Mean(part_values);
      aware_means.push_back(*cat.part_aware);
    }
    cat.part_agnostic = AveragePrecision(all_pred, all_gt);
    if (cat.part_agnostic) agnostic_means.push_back(*cat.part_agnostic);
    result.categories.push_back(std::move(cat));
  }
  result.part_aware_mean = Mean(aware_means);
  result.part_agnostic_mean = Mean(agnostic_means);
  return result;
}

std::string ToJson(const ApResult& result) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json cats = nlohmann::json::object();
  for (const CategoryAp& c : result.categories) {
    nlohmann::json parts = nlohmann::json::object();
    for (std::size_t j = 0; j < c.parts.size(); ++j) parts[c.parts[j]] = opt(c.part_ap[j]);
    cats[c.name] = {{"parts", parts},
                    {"part_aware", opt(c.part_aware)},
                    {"part_agnostic", opt(c.part_agnostic)},
                    {"objects", c.num_objects}};
  }
  nlohmann::json j = {{"categories", cats},
                      {"part_aware_map50", result.part_aware_mean},
                      {"part_agnostic_map50", result.part_agnostic_mean}};
  return j.dump(2) + "\n";
}

std::vector<InstanceMask> InstanceFile::Masks() const {
  auto masks = MasksFromPoints(point_instance, point_label, scores);
  for (std::size_t id = 0; id < masks.size() && id < labels.size(); ++id) {
    if (masks[id].label != labels[id]) {
      throw Error("instance " + std::to_string(id) + " header label disagrees with its points");
    }
  }
  return masks;
}

void WriteInstances(const std::string& path, const InstanceFile& file) {
  std::string out = "#liftseg-instances v1 N=" + std::to_string(file.point_instance.size()) +
                    " I=" + std::to_string(file.labels.size()) + "\n";
  for (std::size_t id = 0; id < file.labels.size(); ++id) {
    out += "#instance " + std::to_string(id) + " " + std::to_string(file.labels[id]) + " " +
           io::FormatDouble(file.scores[id]) + "\n";
  }
  for (std::size_t p = 0; p < file.point_instance.size(); ++p) {
    out += std::to_string(p) + " " + std::to_string(file.point_instance[p]) + " " +
           std::to_string(file.point_label[p]) + "\n";
  }
  io::WriteFile(path, out);
}

InstanceFile ReadInstances(const std::string& path, std::size_t num_points) {
  const std::string text = io::ReadFile(path);
  InstanceFile file;
  file.point_instance.assign(num_points, -1);
  file.point_label.assign(num_points, -1);
  std::vector<bool> seen(num_points, false);
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++line_no;
    const auto tok = io::SplitWhitespace(line);
    if (tok.empty()) continue;
    if (tok[0] == "#instance") {
      long long id = 0, label = 0;
      double score = 0.0;
      if (tok.size() != 4 || !io::ParseInt(tok[1], id) || !io::ParseInt(tok[2], label) ||
          !io::ParseDouble(tok[3], score)) {
        throw ParseError(path, line_no, "expected '#instance <id> <label> <score>'");
      }
      if (id != static_cast<long long>(file.labels.size())) {
        throw ParseError(path, line_no, "instance headers must be numbered 0, 1, ...");
      }
      file.labels.push_back(static_cast<int>(label));
      file.scores.push_back(score);
      continue;
    }
    if (tok[0].front() == '#') continue;
    long long p = 0, id = 0, label = 0;
    if (tok.size() != 3 || !io::ParseInt(tok[0], p) || !io::ParseInt(tok[1], id) ||
        !io::ParseInt(tok[2], label)) {
      throw ParseError(path, line_no, "expected 'point_idx instance_id label_id'");
    }
    if (p < 0 || static_cast<std::size_t>(p) >= num_points) {
      throw ParseError(path, line_no, "point index " + std::to_string(p) + " out of range");
    }
    if (seen[p]) throw ParseError(path, line_no, "duplicate point " + std::to_string(p));
    if (id < -1 || id >= static_cast<long long>(file.labels.size())) {
      throw ParseError(path, line_no, "unknown instance id " + std::to_string(id));
    }
    if ((id < 0) != (label < 0)) {
      throw ParseError(path, line_no, "null instance and null label must coincide");
    }
    if (id >= 0 && file.labels[id] != label) {
      throw ParseError(path, line_no, "label disagrees with the instance header");
    }
    seen[p] = true;
    file.point_instance[p] = static_cast<int>(id);
    file.point_label[p] = static_cast<int>(label);
  }
  const auto missing = std::find(seen.begin(), seen.end(), false);
  if (missing != seen.end()) {
    throw ParseError(path, 0, "point " + std::to_string(missing - seen.begin()) + " is not listed");
  }
  return file;
}

InstanceFile ToFile(const InstanceSegmentation& seg, const geom::SuperPointPartition& partition) {
  InstanceFile file;
  file.point_instance = seg.PointInstances(partition);
  file.point_label.resize(file.point_instance.size());
  for (std::size_t p = 0; p < file.point_instance.size(); ++p) {
    const int id = file.point_instance[p];
    file.point_label[p] = id < 0 ? -1 : seg.instance_labels[id];
  }
  file.labels = seg.instance_labels;
  file.scores = seg.instance_scores;
  return file;
}

}  // namespace liftseg::instance
