// src/eval/metrics.cc

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

#include "rnnsearch/eval/metrics.hpp"

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "rnnsearch/errors.hpp"

namespace rnnsearch {

double WerCounts::Wer() const {
  if (reference_length == 0) return Errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(Errors()) / static_cast<double>(reference_length);
}

WerCounts& WerCounts::operator+=(const WerCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  reference_length += o.reference_length;
  return *this;
}

WerCounts Wer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  if (reference.empty() && !hypothesis.empty()) {
    throw DataError("WER is undefined for an empty reference with a nonempty hypothesis");
  }
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  // (errors, insertions + deletions), compared lexicographically.
  using Cost = std::pair<std::size_t, std::size_t>;
  auto plus = [](Cost a, std::size_t errors, std::size_t gaps) {
    return Cost{a.first + errors, a.second + gaps};
  };
  std::vector<Cost> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cost& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = {i, i};
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = {j, j};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const Cost sub = plus(at(i - 1, j - 1), reference[i - 1] == hypothesis[j - 1] ? 0 : 1, 0);
      at(i, j) = std::min({sub, plus(at(i - 1, j), 1, 1), plus(at(i, j - 1), 1, 1)});
    }
  }

  WerCounts c;
  c.reference_length = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == plus(at(i - 1, j - 1), same ? 0 : 1, 0)) {
        if (!same) ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == plus(at(i - 1, j), 1, 1)) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

RtfReport Rtf(double wallclock_s, double audio_s) {
  if (!(audio_s > 0.0)) throw DataError("RTF needs a positive total audio duration");
  return RtfReport{wallclock_s, audio_s, wallclock_s / audio_s};
}

RtfReport Rtf(double wallclock_s, const CorpusManifest& manifest) {
  return Rtf(wallclock_s, manifest.TotalDuration());
}

}  // namespace rnnsearch
