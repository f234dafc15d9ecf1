// src/lm/perplexity.cc

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

#include "rnnsearch/lm/perplexity.hpp"

#include <cmath>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/lm/history.hpp"

namespace rnnsearch {

PerplexityResult Perplexity(const LmScorer& scorer,
                            const std::vector<std::vector<std::string>>& sentences) {
  if (scorer.interpolated() && !scorer.config().renormalize) {
    throw ConfigError("perplexity of an interpolated model requires renormalize=true");
  }
  HistoryStore store(scorer);
  const auto unk = scorer.vocab().Find(kUnknownWord);
  PerplexityResult result;
  // Long double keeps N identical terms summing to exactly N times the term.
  long double total = 0.0L;

  for (const auto& sentence : sentences) {
    HistoryId h = store.Initial();
    auto score_token = [&](WordId w) {
      store.EnsureForwarded(h);
      double lp = scorer.Score(store.Get(h), w);
      if (!std::isfinite(lp)) {
        throw DataError("zero-probability token '" + scorer.vocab().Word(w) + "'");
      }
      total += lp;
      ++result.tokens;
      h = store.Extend(h, w);
    };
    for (const auto& word : sentence) {
      auto id = scorer.vocab().Find(word);
      if (!id) {
        if (!unk) throw DataError("word '" + word + "' is out of vocabulary and there is no <unk>");
        id = unk;
        ++result.oov;
      }
      score_token(*id);
    }
    score_token(scorer.sentence_end());
  }
  if (result.tokens == 0) throw DataError("perplexity over an empty corpus");
  result.log_prob = static_cast<double>(total);
  const long double mean = total / static_cast<long double>(result.tokens);
  result.perplexity = std::exp(-static_cast<double>(mean));
  return result;
}

}  // namespace rnnsearch
