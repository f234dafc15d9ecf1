// include/rnnsearch/decoder/oracle.hpp

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

#include <vector>

#include "rnnsearch/decoder/decoder.hpp"
#include "rnnsearch/io/lexicon.hpp"

namespace rnnsearch {

struct SequenceScore {
  std::vector<WordId> words;
  /// Best single state path, variants and LM included (neg-log, scaled).
  double viterbi = kInf;
  /// All state paths and variant combinations summed (neg-log, scaled).
  double fullsum = kInf;
};

struct OracleResult {
  std::vector<WordId> words;
  double score = kInf;
  /// Every enumerated sequence that can cover the utterance.
  std::vector<SequenceScore> sequences;
};

/// Exhaustive search over every word sequence of 1..max_words lexicon words. Each
/// sequence is scored by exact Viterbi and forward passes over the concatenated
/// linear HMMs of all its variant combinations, with the decoder's costs. The best
/// sequence uses the Viterbi or the fullsum score per cfg.mode.
/// Throws ConfigError when |V|^max_words exceeds 10^6.
OracleResult BruteForceOracle(const EmissionMatrix& emissions, const Lexicon& lexicon,
                              const LmScorer& scorer, const HmmTopology& topology,
                              const DecodeConfig& cfg, int max_words);

/// Scores one pronunciation path sequence: the states of each word back to back.
/// Returns {viterbi, forward} acoustic neg-log costs scaled by scale_am, including
/// transition penalties but not variant priors or LM scores.
std::pair<double, double> AlignWords(const EmissionMatrix& emissions,
                                     const std::vector<const std::vector<int>*>& prons,
                                     const HmmTopology& topology, double scale_am);

}  // namespace rnnsearch
