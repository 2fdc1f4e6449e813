/* Copyright 2026 The Meshsearch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#ifndef MESHSEARCH_CLI_H_
#define MESHSEARCH_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace meshsearch {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;  // graph, divisibility, plan replay
inline constexpr int kExitConfig = 3;      // flags, inputs, schedules, limits

// Runs the tool on `args` (without the program name). Subcommands: search,
// estimate, oracle, dump-graph.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace meshsearch

#endif  // MESHSEARCH_CLI_H_
