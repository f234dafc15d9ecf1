// include/rnnsearch/io/text_reader.hpp

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

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "rnnsearch/errors.hpp"

namespace rnnsearch {

/// Line cursor over an in-memory text; tracks 1-based line numbers for error reporting.
class TextReader {
 public:
  explicit TextReader(std::string_view text) : text_(text) {}

  /// Reads the next line (without terminator). Returns false at end of input.
  bool Next(std::string_view* line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view l = text_.substr(pos_, end - pos_);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    pos_ = end + 1;
    ++line_;
    *line = l;
    return true;
  }

  /// Like Next but skips lines that are empty or whitespace-only.
  bool NextNonBlank(std::string_view* line) {
    while (Next(line)) {
      if (line->find_first_not_of(" \t") != std::string_view::npos) return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

  [[noreturn]] void Fail(const std::string& what) const { throw ParseError(what, line_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

inline bool ParseDouble(std::string_view s, double* out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  if (ec == std::errc() && p == s.data() + s.size()) return true;
  // from_chars rejects "inf"/"-inf" spellings used by some writers.
  if (s == "inf" || s == "Infinity") { *out = INFINITY; return true; }
  if (s == "-inf" || s == "-Infinity") { *out = -INFINITY; return true; }
  return false;
}

template <typename Int>
bool ParseInt(std::string_view s, Int* out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && p == s.data() + s.size();
}

/// Reads a whole file into a string; throws DataError on failure.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace rnnsearch
