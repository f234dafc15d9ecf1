// src/lm/backoff_lm.cc

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

#include "rnnsearch/lm/backoff_lm.hpp"

#include <cmath>

namespace rnnsearch {

BackoffLm::BackoffLm(BackoffLmData data) : data_(std::move(data)) {
  unknown_ = data_.vocab.Find(kUnknownWord);
}

std::optional<WordId> BackoffLm::Map(std::string_view word) const {
  if (auto id = data_.vocab.Find(word)) return id;
  return unknown_;
}

double MaxNormalizationError(const BackoffLm& lm) {
  const auto vocab_size = static_cast<WordId>(lm.vocab().size());
  auto context_error = [&](std::span<const WordId> ctx) {
    double total = 0.0;
    for (WordId w = 0; w < vocab_size; ++w) total += std::exp(lm.LogProb(ctx, w));
    return std::abs(total - 1.0);
  };
  double worst = context_error({});
  for (int n = 1; n < lm.order(); ++n) {
    for (const auto& [key, entry] : lm.data().tables[static_cast<std::size_t>(n - 1)]) {
      worst = std::max(worst, context_error(key));
    }
  }
  return worst;
}

}  // namespace rnnsearch
