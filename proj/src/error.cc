// src/error.cc

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

#include "svtk/error.h"

namespace svtk {

ParseError::ParseError(std::size_t line, const std::string &what)
    : Error("line " + std::to_string(line) + ": " + what),
      line_(line),
      detail_(what) {}

FormatError::FormatError(std::uint64_t offset, const std::string &what)
    : Error("offset " + std::to_string(offset) + ": " + what),
      offset_(offset),
      detail_(what) {}

}  // namespace svtk
