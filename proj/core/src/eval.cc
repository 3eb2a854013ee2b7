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

#include "liftseg/eval.h"

#include <map>

#include "json.hpp"
#include "liftseg/error.h"
#include "liftseg/loss.h"

namespace liftseg::eval {

SemanticReport EvaluateSemantic(std::span<const SemanticObject> objects) {
  std::map<std::string, CategoryScore> by_name;
  for (const SemanticObject& obj : objects) {
    auto [it, inserted] = by_name.try_emplace(obj.category);
    CategoryScore& cat = it->second;
    if (inserted) {
      cat.name = obj.category;
      cat.parts = obj.label_names;
      cat.part_iou.assign(obj.label_names.size(), 0.0);
    } else if (cat.parts != obj.label_names) {
      throw Error("objects of category '" + obj.category + "' disagree on their label table");
    }
    if (obj.gt_labels.size() != obj.predicted_labels.size()) {
      throw Error("prediction and ground truth cover different point counts");
    }
    const loss::GroundTruth gt{obj.gt_labels, static_cast<int>(obj.label_names.size())};
    const auto iou = loss::PerLabelIou(gt, loss::OneHot(obj.predicted_labels, gt.num_labels));
    for (std::size_t j = 0; j < iou.size(); ++j) cat.part_iou[j] += iou[j];
    ++cat.num_objects;
  }

  SemanticReport report;
  for (auto& [name, cat] : by_name) {
    double total = 0.0;
    for (double& v : cat.part_iou) {
      v /= cat.num_objects;
      total += v;
    }
    cat.miou = cat.part_iou.empty() ? 1.0 : total / static_cast<double>(cat.part_iou.size());
    report.overall_miou += cat.miou;
    report.categories.push_back(std::move(cat));
  }
  if (!report.categories.empty()) {
    report.overall_miou /= static_cast<double>(report.categories.size());
  }
  return report;
}

std::string ToJson(const SemanticReport& report) {
  nlohmann::json j;
  j["overall_miou"] = report.overall_miou;
  nlohmann::json cats = nlohmann::json::object();
  for (const CategoryScore& c : report.categories) {
    nlohmann::json parts = nlohmann::json::object();
    for (std::size_t p = 0; p < c.parts.size(); ++p) parts[c.parts[p]] = c.part_iou[p];
    cats[c.name] = {{"miou", c.miou}, {"num_objects", c.num_objects}, {"parts", parts}};
  }
  j["categories"] = std::move(cats);
  return j.dump(2) + "\n";
}

}  // namespace liftseg::eval
