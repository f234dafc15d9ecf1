// include/rnnsearch/io/vocabulary.hpp

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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rnnsearch {

using WordId = std::int32_t;

inline constexpr std::string_view kSentenceBegin = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";

/// Bidirectional word <-> id table. Ids are dense and assigned in insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Returns the id of `word`, inserting it if needed.
  WordId Add(std::string_view word);
  std::optional<WordId> Find(std::string_view word) const;
  /// Throws DataError for unknown words.
  WordId Id(std::string_view word) const;
  const std::string& Word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
};

/// FNV-1a over a word id sequence; used to key n-gram tables and history caches.
struct WordSeqHash {
  std::size_t operator()(std::span<const WordId> seq) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (WordId w : seq) {
      h ^= static_cast<std::uint32_t>(w);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
  std::size_t operator()(const std::vector<WordId>& seq) const {
    return (*this)(std::span<const WordId>(seq));
  }
};

/// Splits on runs of ASCII whitespace.
std::vector<std::string> SplitWords(std::string_view text);
std::string JoinWords(std::span<const std::string> words, std::string_view sep = " ");

}  // namespace rnnsearch
