// include/rnnsearch/lm/perplexity.hpp

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
#include <vector>

#include "rnnsearch/lm/scorer.hpp"

namespace rnnsearch {

struct PerplexityResult {
  double perplexity = 0.0;
  /// Sum of natural-log probabilities over all scored tokens.
  double log_prob = 0.0;
  std::size_t tokens = 0;
  /// Words that were not in the global vocabulary and were scored as <unk>.
  std::size_t oov = 0;
};

/// exp(-(sum ln p) / N) over every word plus the sentence end, excluding the
/// sentence begin. An interpolating scorer must have renormalize set.
/// Throws DataError on a zero-probability token.
PerplexityResult Perplexity(const LmScorer& scorer,
                            const std::vector<std::vector<std::string>>& sentences);

}  // namespace rnnsearch
