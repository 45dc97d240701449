// include/svtk/selftest.h

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

#ifndef SVTK_SELFTEST_H_
#define SVTK_SELFTEST_H_

#include <ostream>

namespace svtk {

/// Runs a fast subset of the brute-force oracle checks and prints one
/// "PASS <name>" or "FAIL <name>" line per property. Returns true if all pass.
bool RunSelfTest(std::ostream &out);

}  // namespace svtk

#endif  // SVTK_SELFTEST_H_
