// Copyright 2026 The chanvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHANVEC_TOOLS_COMMANDS_H_
#define CHANVEC_TOOLS_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace chanvec::tools {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInputFormat = 3;
inline constexpr int kExitEmptyResult = 4;

// Runs `chanvec <subcommand> ...`. args[0] is the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace chanvec::tools

#endif  // CHANVEC_TOOLS_COMMANDS_H_
