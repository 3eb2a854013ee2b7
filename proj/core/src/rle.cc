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

#include "liftseg/rle.h"

#include <string>

#include "liftseg/error.h"

namespace liftseg::detect {

std::vector<int> EncodeRle(std::span<const std::uint8_t> bits) {
  std::vector<int> runs;
  std::uint8_t current = 0;
  int length = 0;
  for (std::uint8_t b : bits) {
    const std::uint8_t v = b ? 1 : 0;
    if (v != current) {
      runs.push_back(length);
      current = v;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

std::vector<std::uint8_t> DecodeRle(std::span<const int> runs, std::size_t size) {
  std::vector<std::uint8_t> bits;
  bits.reserve(size);
  std::uint8_t value = 0;
  for (int run : runs) {
    if (run < 0) throw Error("negative run length " + std::to_string(run));
    if (bits.size() + static_cast<std::size_t>(run) > size) {
      throw Error("runs exceed the bitmap size " + std::to_string(size));
    }
    bits.insert(bits.end(), static_cast<std::size_t>(run), value);
    value ^= 1;
  }
  if (bits.size() != size) {
    throw Error("runs cover " + std::to_string(bits.size()) + " pixels, expected " +
                std::to_string(size));
  }
  return bits;
}

}  // namespace liftseg::detect
