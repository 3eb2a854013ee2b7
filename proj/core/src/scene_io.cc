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

#include "liftseg/scene_io.h"

#include <map>
#include <string_view>

#include "io_util.h"
#include "liftseg/error.h"

namespace liftseg::geom {
namespace {

using nlohmann::json;

// Parses "KEY=value" header fields after a fixed magic and version.
std::map<std::string, long long> ParseHeader(const std::string& path,
                                             std::string_view line,
                                             std::string_view magic) {
  const auto tokens = io::SplitWhitespace(line);
  if (tokens.size() < 2 || tokens[0] != magic) {
    throw ParseError(path, 1, "expected header starting with '" +
                                  std::string(magic) + "'");
  }
  if (tokens[1] != "v1") {
    throw ParseError(path, 1, "unsupported version '" + std::string(tokens[1]) + "'");
  }
  std::map<std::string, long long> fields;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    long long v = 0;
    if (eq == std::string_view::npos || !io::ParseInt(tokens[i].substr(eq + 1), v)) {
      throw ParseError(path, 1, "malformed header field '" + std::string(tokens[i]) + "'");
    }
    fields[std::string(tokens[i].substr(0, eq))] = v;
  }
  return fields;
}

long long RequireField(const std::string& path,
                       const std::map<std::string, long long>& fields,
                       const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw ParseError(path, 1, "header lacks " + key + "=");
  return it->second;
}

}  // namespace

void ValidateScene(const Scene& scene) {
  const std::size_t n = scene.cloud.size();
  if (scene.partition.num_points() != n) {
    throw Error("partition covers " + std::to_string(scene.partition.num_points()) +
                " points, cloud has " + std::to_string(n));
  }
  if (scene.gt_labels.size() != n) {
    throw Error("ground truth covers " + std::to_string(scene.gt_labels.size()) +
                " points, cloud has " + std::to_string(n));
  }
  const int num_labels = scene.num_labels();
  for (std::size_t p = 0; p < n; ++p) {
    if (scene.gt_labels[p] < -1 || scene.gt_labels[p] >= num_labels) {
      throw Error("point " + std::to_string(p) + " has label " +
                  std::to_string(scene.gt_labels[p]) + " outside [-1, " +
                  std::to_string(num_labels) + ")");
    }
  }
}

void WriteCloudFile(const std::string& path, const Scene& scene) {
  ValidateScene(scene);
  std::string out = "#liftseg-cloud v1 N=" + std::to_string(scene.cloud.size()) +
                    " S=" + std::to_string(scene.partition.num_superpoints()) +
                    " L=" + std::to_string(scene.num_labels()) + "\n";
  for (std::size_t p = 0; p < scene.cloud.size(); ++p) {
    const Vec3& v = scene.cloud[p];
    out += io::FormatDouble(v.x()) + " " + io::FormatDouble(v.y()) + " " +
           io::FormatDouble(v.z()) + " " +
           std::to_string(scene.partition.superpoint_of(p)) + " " +
           std::to_string(scene.gt_labels[p]) + "\n";
  }
  io::WriteFile(path, out);
}

Scene ReadCloudFile(const std::string& path) {
  const std::string text = io::ReadFile(path);
  std::string_view rest(text);
  auto next_line = [&rest]() {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view() : rest.substr(nl + 1);
    return line;
  };
  if (rest.empty()) throw ParseError(path, 1, "empty file");
  const auto fields = ParseHeader(path, next_line(), "#liftseg-cloud");
  const long long n = RequireField(path, fields, "N");
  const long long s = RequireField(path, fields, "S");
  const long long l = RequireField(path, fields, "L");
  if (n < 1 || s < 1 || l < 0) throw ParseError(path, 1, "header counts out of range");

  std::vector<Vec3> points;
  std::vector<int> sp;
  std::vector<int> gt;
  points.reserve(n);
  sp.reserve(n);
  gt.reserve(n);
  int line_no = 1;
  while (!rest.empty()) {
    const std::string_view line = next_line();
    ++line_no;
    const auto tokens = io::SplitWhitespace(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() != 5) {
      throw ParseError(path, line_no, "expected 'x y z superpoint_id gt_label_id'");
    }
    double xyz[3];
    for (int a = 0; a < 3; ++a) {
      if (!io::ParseDouble(tokens[a], xyz[a]) || !std::isfinite(xyz[a])) {
        throw ParseError(path, line_no, "bad coordinate '" + std::string(tokens[a]) + "'");
      }
    }
    long long sid = 0, lid = 0;
    if (!io::ParseInt(tokens[3], sid) || sid < 0 || sid >= s) {
      throw ParseError(path, line_no, "superpoint_id out of range");
    }
    if (!io::ParseInt(tokens[4], lid) || lid < -1 || lid >= l) {
      throw ParseError(path, line_no, "gt_label_id out of range");
    }
    points.emplace_back(xyz[0], xyz[1], xyz[2]);
    sp.push_back(static_cast<int>(sid));
    gt.push_back(static_cast<int>(lid));
  }
  if (static_cast<long long>(points.size()) != n) {
    throw ParseError(path, line_no, "header declares N=" + std::to_string(n) +
                                        " but file has " +
                                        std::to_string(points.size()) + " points");
  }
  Scene scene;
  scene.cloud = PointCloud(std::move(points));
  try {
    scene.partition = SuperPointPartition(std::move(sp), static_cast<int>(s));
  } catch (const Error& e) {
    throw ParseError(path, 0, e.what());
  }
  scene.gt_labels = std::move(gt);
  for (long long j = 0; j < l; ++j) scene.label_names.push_back("label" + std::to_string(j));
  return scene;
}

void WriteLabelTable(const std::string& path, const LabelTable& table) {
  json j;
  j["labels"] = table.labels;
  j["category"] = table.category;
  io::WriteJsonFile(path, j);
}

LabelTable ReadLabelTable(const std::string& path) {
  const json j = io::ParseJsonFile(path);
  LabelTable table;
  try {
    table.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("category")) table.category = j.at("category").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  return table;
}

Scene LoadScene(const std::string& cloud_path, const std::string& labels_path) {
  Scene scene = ReadCloudFile(cloud_path);
  const LabelTable table = ReadLabelTable(labels_path);
  if (table.labels.size() != scene.label_names.size()) {
    throw ParseError(labels_path, 0,
                     "label table has " + std::to_string(table.labels.size()) +
                         " names, cloud header declares L=" +
                         std::to_string(scene.label_names.size()));
  }
  scene.label_names = table.labels;
  scene.category = table.category;
  return scene;
}

void SaveScene(const Scene& scene, const std::string& cloud_path,
               const std::string& labels_path) {
  WriteCloudFile(cloud_path, scene);
  WriteLabelTable(labels_path, {scene.label_names, scene.category});
}

void WriteViewSet(const std::string& path, const ViewSet& views) {
  json j;
  j["version"] = 1;
  j["splat_radius_px"] = views.options.splat_radius_px;
  j["depth_epsilon"] = views.options.depth_epsilon;
  json cams = json::array();
  for (const Camera& c : views.cameras) {
    cams.push_back({{"direction", {c.direction().x(), c.direction().y(), c.direction().z()}},
                    {"distance", c.distance()},
                    {"width", c.width()},
                    {"height", c.height()},
                    {"fov_y", c.fov_y()}});
  }
  j["cameras"] = std::move(cams);
  io::WriteJsonFile(path, j);
}

ViewSet ReadViewSet(const std::string& path) {
  const json j = io::ParseJsonFile(path);
  ViewSet views;
  try {
    if (j.at("version").get<int>() != 1) throw ParseError(path, 0, "unsupported version");
    views.options.splat_radius_px = j.at("splat_radius_px").get<double>();
    views.options.depth_epsilon = j.at("depth_epsilon").get<double>();
    for (const json& c : j.at("cameras")) {
      const auto d = c.at("direction").get<std::vector<double>>();
      if (d.size() != 3) throw ParseError(path, 0, "camera direction needs 3 components");
      views.cameras.emplace_back(Vec3(d[0], d[1], d[2]), c.at("distance").get<double>(),
                                 c.at("width").get<int>(), c.at("height").get<int>(),
                                 c.at("fov_y").get<double>());
    }
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, 0, e.what());
  }
  return views;
}

void WriteVisibility(const std::string& path, const VisibilityMap& map) {
  std::string out = "#liftseg-visibility v1 K=" + std::to_string(map.num_views()) +
                    " N=" + std::to_string(map.num_points()) + "\n";
  out.reserve(out.size() + map.num_views() * (map.num_points() + 1));
  for (int k = 0; k < map.num_views(); ++k) {
    for (std::uint8_t b : map.view(k)) out.push_back(b ? '1' : '0');
    out.push_back('\n');
  }
  io::WriteFile(path, out);
}

VisibilityMap ReadVisibility(const std::string& path) {
  const std::string text = io::ReadFile(path);
  std::string_view rest(text);
  const auto nl = rest.find('\n');
  const auto fields = ParseHeader(path, rest.substr(0, nl), "#liftseg-visibility");
  const long long k = RequireField(path, fields, "K");
  const long long n = RequireField(path, fields, "N");
  if (k < 0 || n < 0) throw ParseError(path, 1, "header counts out of range");
  rest = nl == std::string_view::npos ? std::string_view() : rest.substr(nl + 1);
  VisibilityMap map(static_cast<int>(k), static_cast<std::size_t>(n));
  for (long long v = 0; v < k; ++v) {
    const auto end = rest.find('\n');
    std::string_view line = rest.substr(0, end);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (static_cast<long long>(line.size()) != n) {
      throw ParseError(path, static_cast<int>(v) + 2,
                       "expected " + std::to_string(n) + " visibility flags");
    }
    for (long long p = 0; p < n; ++p) {
      if (line[p] != '0' && line[p] != '1') {
        throw ParseError(path, static_cast<int>(v) + 2, "visibility flags must be 0 or 1");
      }
      map.set(static_cast<int>(v), static_cast<std::size_t>(p), line[p] == '1');
    }
    rest = end == std::string_view::npos ? std::string_view() : rest.substr(end + 1);
  }
  return map;
}

}  // namespace liftseg::geom
