/*
 * Copyright 2026 The bbev Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BBEV_TOOLS_CLI_H_
#define BBEV_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace bbev::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,           // bad flags, unparsable configs or pose files
  kIoFailure = 3,       // unreadable or malformed files
  kDataFailure = 4,     // empty, degenerate or inconsistent data
  kPartialFailure = 5,  // some inputs of a batch failed
};

// Runs one command line. `args` excludes the program name. Every flag can
// also be set through an environment variable: BBEV_ followed by the flag
// name upper-cased with dashes turned into underscores (--sigma-t ->
// BBEV_SIGMA_T). Flags given on the command line win.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace bbev::cli

#endif  // BBEV_TOOLS_CLI_H_
