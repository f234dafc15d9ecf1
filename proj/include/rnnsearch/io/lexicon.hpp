// include/rnnsearch/io/lexicon.hpp

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
#include <vector>

namespace rnnsearch {

struct Pronunciation {
  double prob = 1.0;
  /// Emission-state indices, left to right.
  std::vector<int> states;
};

struct LexiconWord {
  std::string word;
  std::vector<Pronunciation> variants;
};

/// Pronunciation lexicon. Words keep their first-appearance order; the variant
/// index of a pronunciation is its position in `variants`.
struct Lexicon {
  std::vector<LexiconWord> words;

  const LexiconWord* Find(std::string_view word) const;
  /// Largest state index used by any pronunciation, or -1 when empty.
  int MaxState() const;
  std::size_t NumPronunciations() const;
};

/// Parses `word <TAB> variant_prob <TAB> s1 s2 ... sk` lines. Variant probabilities
/// of each word must sum to 1 within 1e-6.
Lexicon LoadLexicon(std::string_view text);
Lexicon LoadLexiconFile(const std::string& path);
std::string WriteLexicon(const Lexicon& lex);

}  // namespace rnnsearch
