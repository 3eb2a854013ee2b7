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

// Minimal TOML-like key/value text:
//
//   # comment
//   key = value
//   [section]      (may repeat; each occurrence starts a new section)
//   key = "quoted value"

#ifndef LIFTSEG_KV_CONFIG_H_
#define LIFTSEG_KV_CONFIG_H_

#include <optional>
#include <string>
#include <vector>

namespace liftseg {

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

class KvSection {
 public:
  KvSection(std::string name, std::string source) : name_(std::move(name)), source_(std::move(source)) {}

  const std::string& name() const { return name_; }
  const std::vector<KvEntry>& entries() const { return entries_; }
  void Add(KvEntry e) { entries_.push_back(std::move(e)); }

  bool Has(const std::string& key) const { return Find(key) != nullptr; }
  std::optional<std::string> GetString(const std::string& key) const;
  std::optional<double> GetDouble(const std::string& key) const;
  std::optional<long long> GetInt(const std::string& key) const;
  std::optional<bool> GetBool(const std::string& key) const;
  // Whitespace- or comma-separated numbers.
  std::optional<std::vector<double>> GetDoubles(const std::string& key) const;
  // Throws liftseg::ParseError for keys outside `allowed`.
  void RequireKnownKeys(const std::vector<std::string>& allowed) const;

 private:
  const KvEntry* Find(const std::string& key) const;
  [[noreturn]] void Fail(const KvEntry& e, const std::string& message) const;

  std::string name_;
  std::string source_;
  std::vector<KvEntry> entries_;
};

struct KvDocument {
  std::vector<KvSection> sections;  // sections[0] is the unnamed root

  const KvSection& root() const { return sections.front(); }
};

KvDocument ParseKv(const std::string& text, const std::string& source = "<string>");
KvDocument LoadKvFile(const std::string& path);

}  // namespace liftseg

#endif  // LIFTSEG_KV_CONFIG_H_
