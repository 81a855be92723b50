// Copyright 2026 The iqsync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IQSYNC_TOOLS_CLI_H
#define IQSYNC_TOOLS_CLI_H

#include <iosfwd>
#include <string>
#include <vector>

namespace iqsync::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    EXIT_OK = 0,
    EXIT_USAGE = 1,
    EXIT_DATA = 2,
    EXIT_NO_SOLUTION = 3,
};

/// Runs the command line `args` (args[0] is the program name). Regular output
/// goes to `out`, diagnostics to `err`. Output files named by flags are
/// written directly.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace iqsync::cli

#endif
