/*
 * Copyright 2026 The ordutil Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef ORDUTIL_TOOLS_CLI_H_
#define ORDUTIL_TOOLS_CLI_H_

#include <iosfwd>

namespace ordutil::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;

// Runs `ordutil <subcommand> ...` writing results to `out` and messages to
// `err`. Subcommands: solve, sweep, check, serve.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ordutil::cli

#endif  // ORDUTIL_TOOLS_CLI_H_
