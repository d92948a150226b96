// Copyright 2026 The mrea Authors.
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

#ifndef MREA_TOOLS_APP_COMMANDS_HPP_
#define MREA_TOOLS_APP_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace mrea::app {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kDataError = 3,
  kSolverError = 4,
};

// Parses the command line (args[0] is the program name), runs the selected
// command and maps failures to exit codes. Results go to `out`, diagnostics
// to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrea::app

#endif  // MREA_TOOLS_APP_COMMANDS_HPP_
