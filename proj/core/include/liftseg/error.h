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

#ifndef LIFTSEG_ERROR_H_
#define LIFTSEG_ERROR_H_

#include <stdexcept>
#include <string>

namespace liftseg {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" catch this.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file. Carries the path and, when known, the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, int line, const std::string& message)
      : Error(Format(path, line, message)), path_(path), line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  static std::string Format(const std::string& path, int line,
                            const std::string& message) {
    std::string out = path;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + message;
  }

  std::string path_;
  int line_;
};

// Filesystem failure (open, write, mkdir).
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace liftseg

#endif  // LIFTSEG_ERROR_H_
