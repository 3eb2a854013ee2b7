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

// Binary run-length coding. Runs alternate between 0 and 1 values starting
// with a (possibly empty) run of zeros, in row-major pixel order.

#ifndef LIFTSEG_RLE_H_
#define LIFTSEG_RLE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace liftseg::detect {

std::vector<int> EncodeRle(std::span<const std::uint8_t> bits);

// Throws liftseg::Error if a run is negative or the runs do not sum to size.
std::vector<std::uint8_t> DecodeRle(std::span<const int> runs, std::size_t size);

}  // namespace liftseg::detect

#endif  // LIFTSEG_RLE_H_
