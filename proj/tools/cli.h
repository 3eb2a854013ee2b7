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

// The liftseg command-line surface. Run() is exposed so tests can drive the
// tool in-process.

#ifndef LIFTSEG_TOOLS_CLI_H_
#define LIFTSEG_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace liftseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace liftseg::cli

#endif  // LIFTSEG_TOOLS_CLI_H_
