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

#ifndef ENDPOINT_RT_LOG_H_
#define ENDPOINT_RT_LOG_H_

#include <string_view>

namespace endpoint_rt {

// Sends spdlog output to stderr at the level named by ENDPOINT_RT_LOG
// (trace, debug, info, warn, error, off); warn when unset or unknown.
void InitLogging();

// Overrides the level by name; returns false on an unknown name.
bool SetLogLevel(std::string_view name);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_LOG_H_
