// Copyright (c) 2026 The endpoint-rt Authors
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

#ifndef ENDPOINT_RT_TOOLS_COMMANDS_H_
#define ENDPOINT_RT_TOOLS_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace endpoint_rt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs the endpoint_rt command line. args[0] is the program name. Returns
// 0 on success, 1 on a runtime failure and 2 on a usage or config error.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_TOOLS_COMMANDS_H_
