// Copyright 2026 The Rekeyrand Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: gen, chisq, compare, intervals.

#ifndef REKEYRAND_CLI_H_
#define REKEYRAND_CLI_H_

#include <iosfwd>
#include <span>
#include <string>

namespace rekeyrand {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

// `args` is the full argument vector including the program name. Normal
// output goes to `out` unless --output names a file; diagnostics go to `err`.
int RunCli(std::span<const std::string> args, std::ostream& out,
           std::ostream& err);

}  // namespace rekeyrand

#endif  // REKEYRAND_CLI_H_
