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

// Dataset-level semantic evaluation: IoU per part, averaged over the parts of
// a category, then over categories.

#ifndef LIFTSEG_EVAL_H_
#define LIFTSEG_EVAL_H_

#include <span>
#include <string>
#include <vector>

namespace liftseg::eval {

struct SemanticObject {
  std::string category;
  std::vector<std::string> label_names;
  std::vector<int> gt_labels;
  std::vector<int> predicted_labels;
};

struct CategoryScore {
  std::string name;
  std::vector<std::string> parts;
  std::vector<double> part_iou;  // mean over the category's objects
  double miou = 0.0;             // mean over parts
  int num_objects = 0;
};

struct SemanticReport {
  std::vector<CategoryScore> categories;  // sorted by name
  double overall_miou = 0.0;              // mean over categories
};

// Objects of one category must share their label table.
SemanticReport EvaluateSemantic(std::span<const SemanticObject> objects);

std::string ToJson(const SemanticReport& report);

}  // namespace liftseg::eval

#endif  // LIFTSEG_EVAL_H_
