// include/rnnsearch/lm/backoff_lm.hpp

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

#include <optional>
#include <span>
#include <string_view>

#include "rnnsearch/io/arpa.hpp"
#include "rnnsearch/log_math.hpp"

namespace rnnsearch {

/// Read-only backoff n-gram scorer over a loaded ARPA model. Scores are natural log.
class BackoffLm {
 public:
  explicit BackoffLm(BackoffLmData data);

  const BackoffLmData& data() const { return data_; }
  const Vocabulary& vocab() const { return data_.vocab; }
  int order() const { return data_.order; }
  std::optional<WordId> unknown() const { return unknown_; }

  /// Maps a word to its id, falling back to <unk>. Returns nullopt when the word is
  /// absent and the model has no <unk>.
  std::optional<WordId> Map(std::string_view word) const;

  /// ln p(word | context), context most-recent-last in this model's ids.
  double LogProb(std::span<const WordId> context, WordId word) const {
    return Log10ToLn(data_.Log10Prob(context, word));
  }

 private:
  BackoffLmData data_;
  std::optional<WordId> unknown_;
};

/// Largest |sum_w p(w | ctx) - 1| over the empty context and every stored n-gram of
/// order < N used as a context. Sums run over the whole vocabulary.
double MaxNormalizationError(const BackoffLm& lm);

}  // namespace rnnsearch
