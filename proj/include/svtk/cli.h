// include/svtk/cli.h

// Copyright 2026  The svtk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SVTK_CLI_H_
#define SVTK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace svtk {

inline constexpr const char *kToolkitVersion = "1.0.0";

/// Runs one command line (args[0] is the program name). Machine-readable
/// output goes to `out`, diagnostics to `err`. Returns 0 on success, 1 on a
/// usage error, 2 on a data or format error.
int Dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace svtk

#endif  // SVTK_CLI_H_
