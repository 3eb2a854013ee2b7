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

#include <gtest/gtest.h>

#include "json.hpp"
#include "liftseg/error.h"
#include "liftseg/vote.h"

namespace liftseg::eval {
namespace {

SemanticObject Obj(const std::string& cat, std::vector<std::string> names, std::vector<int> gt,
                   std::vector<int> pred) {
  return {cat, std::move(names), std::move(gt), std::move(pred)};
}

TEST(EvalSemanticTest, AveragesPartsThenObjectsThenCategories) {
  constexpr int kN = vote::kNullLabel;
  // chair object 1: seat IoU 1/2, back IoU 1.
  // chair object 2: seat IoU 1, back absent everywhere so counts as 1.
  // lamp: shade IoU 1/3.
  const std::vector<SemanticObject> objs{
      Obj("chair", {"seat", "back"}, {0, 0, 1}, {0, kN, 1}),
      Obj("chair", {"seat", "back"}, {0, 0}, {0, 0}),
      Obj("lamp", {"shade"}, {0, kN, kN}, {0, 0, 0}),
  };
  const auto r = EvaluateSemantic(objs);
  ASSERT_EQ(r.categories.size(), 2u);
  EXPECT_EQ(r.categories[0].name, "chair");
  EXPECT_EQ(r.categories[0].num_objects, 2);
  EXPECT_NEAR(r.categories[0].part_iou[0], 0.75, 1e-12);
  EXPECT_NEAR(r.categories[0].part_iou[1], 1.0, 1e-12);
  EXPECT_NEAR(r.categories[0].miou, 0.875, 1e-12);
  EXPECT_NEAR(r.categories[1].miou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.overall_miou, (0.875 + 1.0 / 3.0) / 2.0, 1e-12);
}

TEST(EvalSemanticTest, IdentityAndEmpty) {
  const std::vector<SemanticObject> objs{Obj("a", {"x", "y"}, {0, 1, 1}, {0, 1, 1})};
  EXPECT_EQ(EvaluateSemantic(objs).overall_miou, 1.0);
  const std::vector<SemanticObject> none_predicted{Obj("a", {"x"}, {0, 0}, {-1, -1})};
  EXPECT_EQ(EvaluateSemantic(none_predicted).overall_miou, 0.0);
  EXPECT_EQ(EvaluateSemantic({}).overall_miou, 0.0);
}

TEST(EvalSemanticTest, RejectsInconsistentInput) {
  const std::vector<SemanticObject> tables{Obj("a", {"x"}, {0}, {0}), Obj("a", {"y"}, {0}, {0})};
  EXPECT_THROW(EvaluateSemantic(tables), Error);
  const std::vector<SemanticObject> sizes{Obj("a", {"x"}, {0, 0}, {0})};
  EXPECT_THROW(EvaluateSemantic(sizes), Error);
}

TEST(EvalSemanticTest, JsonLayout) {
  const std::vector<SemanticObject> objs{Obj("a", {"x", "y"}, {0, 1}, {0, 0})};
  const auto j = nlohmann::json::parse(ToJson(EvaluateSemantic(objs)));
  EXPECT_NEAR(j["overall_miou"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["categories"]["a"]["parts"]["x"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(j["categories"]["a"]["num_objects"].get<int>(), 1);
}

}  // namespace
}  // namespace liftseg::eval
