// include/rnnsearch/errors.hpp

// Copyright 2026  The rnnsearch authors

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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rnnsearch {

/// Base for every error raised on bad input data (as opposed to bad usage).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text artifact. Carries the 1-based line number of the offending line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration values (negative beam, k < 1, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when pruning removed every hypothesis.
class SearchCollapsed : public DataError {
 public:
  explicit SearchCollapsed(int frame)
      : DataError("search collapsed at frame " + std::to_string(frame)), frame_(frame) {}
  int frame() const { return frame_; }

 private:
  int frame_;
};

/// More demanded LM requests than fit in one batch.
class BatchOverflow : public std::runtime_error {
 public:
  BatchOverflow(std::size_t demanded, std::size_t capacity)
      : std::runtime_error("batch overflow: " + std::to_string(demanded - capacity) +
                           " demanded requests beyond capacity " + std::to_string(capacity)),
        overflow_(demanded - capacity) {}
  std::size_t overflow() const { return overflow_; }

 private:
  std::size_t overflow_;
};

}  // namespace rnnsearch
