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

#include <algorithm>
#include <sstream>

#include "io_util.h"
#include "liftseg/error.h"

namespace liftseg {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const KvEntry* KvSection::Find(const std::string& key) const {
  // Later assignments win.
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return &*it;
  }
  return nullptr;
}

void KvSection::Fail(const KvEntry& e, const std::string& message) const {
  throw ParseError(source_, e.line, e.key + ": " + message);
}

std::optional<std::string> KvSection::GetString(const std::string& key) const {
  const KvEntry* e = Find(key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> KvSection::GetDouble(const std::string& key) const {
  const KvEntry* e = Find(key);
  if (!e) return std::nullopt;
  double v = 0.0;
  if (!io::ParseDouble(e->value, v)) Fail(*e, "expected a number, got '" + e->value + "'");
  return v;
}

std::optional<long long> KvSection::GetInt(const std::string& key) const {
  const KvEntry* e = Find(key);
  if (!e) return std::nullopt;
  long long v = 0;
  if (!io::ParseInt(e->value, v)) Fail(*e, "expected an integer, got '" + e->value + "'");
  return v;
}

std::optional<bool> KvSection::GetBool(const std::string& key) const {
  const KvEntry* e = Find(key);
  if (!e) return std::nullopt;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  Fail(*e, "expected true or false, got '" + e->value + "'");
}

std::optional<std::vector<double>> KvSection::GetDoubles(const std::string& key) const {
  const KvEntry* e = Find(key);
  if (!e) return std::nullopt;
  std::string text = e->value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::vector<double> out;
  for (auto tok : io::SplitWhitespace(text)) {
    double v = 0.0;
    if (!io::ParseDouble(tok, v)) Fail(*e, "expected numbers, got '" + e->value + "'");
    out.push_back(v);
  }
  return out;
}

void KvSection::RequireKnownKeys(const std::vector<std::string>& allowed) const {
  for (const KvEntry& e : entries_) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      Fail(e, "unknown key" + (name_.empty() ? std::string() : " in [" + name_ + "]"));
    }
  }
}

KvDocument ParseKv(const std::string& text, const std::string& source) {
  KvDocument doc;
  doc.sections.emplace_back("", source);
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError(source, line_no, "malformed section header");
      }
      doc.sections.emplace_back(Trim(line.substr(1, line.size() - 2)), source);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected 'key = value'");
    KvEntry e;
    e.key = Trim(line.substr(0, eq));
    e.value = Trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) throw ParseError(source, line_no, "empty key");
    if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') {
      e.value = e.value.substr(1, e.value.size() - 2);
    }
    doc.sections.back().Add(std::move(e));
  }
  return doc;
}

KvDocument LoadKvFile(const std::string& path) { return ParseKv(io::ReadFile(path), path); }

}  // namespace liftseg
