// include/rnnsearch/eval/metrics.hpp

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
#include <span>
#include <string>

#include "rnnsearch/io/manifest.hpp"

namespace rnnsearch {

struct WerCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;

  std::size_t Errors() const { return substitutions + deletions + insertions; }
  /// Errors over reference words; 0 for an empty reference without errors.
  double Wer() const;
  WerCounts& operator+=(const WerCounts& o);
  bool operator==(const WerCounts&) const = default;
};

/// Unit-cost Levenshtein alignment. Among optimal alignments the one with the fewest
/// insertions plus deletions is counted, so swapping the arguments swaps D and I.
/// Throws DataError for an empty reference with a nonempty hypothesis.
WerCounts Wer(std::span<const std::string> reference, std::span<const std::string> hypothesis);

struct RtfReport {
  double wallclock_s = 0.0;
  double audio_s = 0.0;
  double rtf = 0.0;
};

/// wallclock over the summed manifest durations. Throws DataError on zero audio.
RtfReport Rtf(double wallclock_s, const CorpusManifest& manifest);
RtfReport Rtf(double wallclock_s, double audio_s);

}  // namespace rnnsearch
