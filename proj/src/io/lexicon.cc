// src/io/lexicon.cc

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

#include "rnnsearch/io/lexicon.hpp"

#include <cmath>
#include <fmt/format.h>
#include <unordered_map>

#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

const LexiconWord* Lexicon::Find(std::string_view word) const {
  for (const auto& w : words) {
    if (w.word == word) return &w;
  }
  return nullptr;
}

int Lexicon::MaxState() const {
  int hi = -1;
  for (const auto& w : words) {
    for (const auto& p : w.variants) {
      for (int s : p.states) hi = std::max(hi, s);
    }
  }
  return hi;
}

std::size_t Lexicon::NumPronunciations() const {
  std::size_t n = 0;
  for (const auto& w : words) n += w.variants.size();
  return n;
}

Lexicon LoadLexicon(std::string_view text) {
  TextReader in(text);
  std::string_view line;
  Lexicon lex;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string, std::size_t> first_line;

  while (in.NextNonBlank(&line)) {
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) in.Fail("expected 'word<TAB>prob<TAB>states'");
    auto word_fields = SplitWords(line.substr(0, tab1));
    if (word_fields.size() != 1) in.Fail("word field must be a single token");
    double prob = 0.0;
    auto prob_fields = SplitWords(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (prob_fields.size() != 1 || !ParseDouble(prob_fields[0], &prob) || !(prob > 0.0) ||
        prob > 1.0) {
      in.Fail("variant probability must be in (0,1]");
    }
    Pronunciation pron;
    pron.prob = prob;
    for (const auto& tok : SplitWords(line.substr(tab2 + 1))) {
      int s = 0;
      if (!ParseInt(std::string_view(tok), &s) || s < 0) in.Fail("bad state index '" + tok + "'");
      pron.states.push_back(s);
    }
    if (pron.states.empty()) in.Fail("empty state sequence for '" + word_fields[0] + "'");

    auto [it, inserted] = index.emplace(word_fields[0], lex.words.size());
    if (inserted) {
      lex.words.push_back(LexiconWord{word_fields[0], {}});
      first_line[word_fields[0]] = in.line();
    }
    lex.words[it->second].variants.push_back(std::move(pron));
  }

  for (const auto& w : lex.words) {
    double total = 0.0;
    for (const auto& p : w.variants) total += p.prob;
    if (std::abs(total - 1.0) > 1e-6) {
      throw ParseError(fmt::format("variant probabilities of '{}' sum to {}", w.word, total),
                       first_line[w.word]);
    }
  }
  return lex;
}

Lexicon LoadLexiconFile(const std::string& path) { return LoadLexicon(ReadFile(path)); }

std::string WriteLexicon(const Lexicon& lex) {
  std::string out;
  for (const auto& w : lex.words) {
    for (const auto& p : w.variants) {
      out += fmt::format("{}\t{}\t{}\n", w.word, p.prob, fmt::join(p.states, " "));
    }
  }
  return out;
}

}  // namespace rnnsearch
