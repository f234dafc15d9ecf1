// include/rnnsearch/io/arpa.hpp

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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

struct NgramEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
};

using NgramTable = std::unordered_map<std::vector<WordId>, NgramEntry, WordSeqHash>;

/// Backoff n-gram model as read from an ARPA file. Values stay in log10 exactly as
/// written so that re-serialization is lossless; scorers convert to natural log.
struct BackoffLmData {
  int order = 0;
  /// Unigram vocabulary, ids in file order.
  Vocabulary vocab;
  /// tables[n-1] holds the n-grams.
  std::vector<NgramTable> tables;

  const NgramEntry* Find(std::span<const WordId> ngram) const;
  /// log10 p(word | context) by the standard backoff recursion. Only the last
  /// order-1 context words are used; context is most-recent-last.
  double Log10Prob(std::span<const WordId> context, WordId word) const;
  std::size_t Count(int n) const { return tables.at(static_cast<std::size_t>(n - 1)).size(); }
};

/// Parses ARPA text. Missing n-gram prefixes are inserted with their backoff estimate
/// as probability and a zero log10 backoff weight.
BackoffLmData LoadArpa(std::string_view text);
BackoffLmData LoadArpaFile(const std::string& path);

/// Serializes with shortest round-trip number formatting; entries sorted by word ids.
std::string WriteArpa(const BackoffLmData& lm);

}  // namespace rnnsearch
