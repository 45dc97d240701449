// include/svtk/error.h

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

#ifndef SVTK_ERROR_H_
#define SVTK_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace svtk {

/// Base of every exception thrown by the toolkit. The CLI maps all of these
/// to exit code 2 (data or format error).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string &what) : Error(what) {}
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &what);
  std::size_t line() const { return line_; }
  /// Message without the location prefix.
  const std::string &detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Malformed binary input; carries the byte offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(std::uint64_t offset, const std::string &what);
  std::uint64_t offset() const { return offset_; }
  const std::string &detail() const { return detail_; }

 private:
  std::uint64_t offset_;
  std::string detail_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error(what) {}
};

}  // namespace svtk

#endif  // SVTK_ERROR_H_
