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

#include "liftseg/kv_config.h"

#include <gtest/gtest.h>

#include "liftseg/error.h"
#include "test_util.h"

namespace liftseg {
namespace {

TEST(KvConfigTest, SectionsCommentsAndQuotes) {
  const auto doc = ParseKv(
      "# header\n"
      "name = \"two words\"  # trailing\n"
      "\n"
      "[noise]\n"
      "rate = 0.25\n"
      "count = 7\n"
      "flag = true\n"
      "dims = 1, 2 3\n");
  ASSERT_EQ(doc.sections.size(), 2u);
  EXPECT_EQ(doc.root().GetString("name"), "two words");
  const KvSection& noise = doc.sections[1];
  EXPECT_EQ(noise.name(), "noise");
  EXPECT_EQ(noise.GetDouble("rate"), 0.25);
  EXPECT_EQ(noise.GetInt("count"), 7);
  EXPECT_EQ(noise.GetBool("flag"), true);
  EXPECT_EQ(noise.GetDoubles("dims"), (std::vector<double>{1, 2, 3}));
  EXPECT_FALSE(noise.GetDouble("missing").has_value());
  EXPECT_EQ(noise.entries()[1].line, 6);
}

TEST(KvConfigTest, LaterAssignmentWins) {
  const auto doc = ParseKv("a = 1\na = 2\n");
  EXPECT_EQ(doc.root().GetInt("a"), 2);
}

TEST(KvConfigTest, MalformedLinesReportLineNumbers) {
  const auto expect_line = [](const std::string& text, int line) {
    try {
      ParseKv(text, "x.cfg");
      ADD_FAILURE() << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
      EXPECT_EQ(e.path(), "x.cfg");
    }
  };
  expect_line("a = 1\njunk\n", 2);
  expect_line("[open\n", 1);
  expect_line("a = 1\n\n = 3\n", 3);
}

TEST(KvConfigTest, TypedGettersRejectBadValues) {
  const auto doc = ParseKv("n = 1.5\nb = maybe\nd = 1, x\n");
  EXPECT_THROW(doc.root().GetInt("n"), ParseError);
  EXPECT_THROW(doc.root().GetBool("b"), ParseError);
  EXPECT_THROW(doc.root().GetDoubles("d"), ParseError);
  EXPECT_THROW(doc.root().RequireKnownKeys({"n", "b"}), ParseError);
  EXPECT_NO_THROW(doc.root().RequireKnownKeys({"n", "b", "d"}));
}

TEST(KvConfigTest, LoadsFile) {
  testing::TempDir dir;
  testing::WriteFile(dir.file("c.cfg"), "k = v\n");
  EXPECT_EQ(LoadKvFile(dir.file("c.cfg")).root().GetString("k"), "v");
  EXPECT_THROW(LoadKvFile(dir.file("absent.cfg")), Error);
}

}  // namespace
}  // namespace liftseg
