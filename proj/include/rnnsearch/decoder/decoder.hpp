// include/rnnsearch/decoder/decoder.hpp

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
#include <vector>

#include "rnnsearch/batch/batcher.hpp"
#include "rnnsearch/io/emissions.hpp"
#include "rnnsearch/io/lattice.hpp"
#include "rnnsearch/lm/history.hpp"
#include "rnnsearch/lm/scorer.hpp"
#include "rnnsearch/log_math.hpp"
#include "rnnsearch/net/prefix_tree.hpp"
#include "rnnsearch/net/topology.hpp"

namespace rnnsearch {

enum class SearchMode { kViterbi, kFullsum };

SearchMode ParseSearchMode(const std::string& name);
const char* SearchModeName(SearchMode mode);

struct DecodeConfig {
  /// Neg-log pruning margin against the frame-best score (also used for word ends).
  double beam = kInf;
  /// Histogram cap on within-word hypotheses per frame; 0 means no cap.
  std::size_t max_hyps = 0;
  /// Word ends whose last n words match are recombined; kUnlimited never truncates.
  int recombination_n = kUnlimited;
  SearchMode mode = SearchMode::kViterbi;
  double scale_am = 1.0;
  double scale_lm = 1.0;
  bool lookahead = true;
  std::size_t lookahead_capacity = 10000;
  /// Recurrent-LM batch capacity.
  std::size_t batch_size = 32;
  CostModel cost;
  /// Simulated search cost per active hypothesis and frame.
  double search_ms_per_hyp = 0.0005;

  /// Throws ConfigError for nonpositive beam or scales, n < 1, zero batch size.
  void Validate() const;
};

/// Candidate word boundary produced when a hypothesis leaves the tree.
struct WordEndHypothesis {
  WordId word = 0;
  int variant = 0;
  int start_frame = 0;
  int end_frame = 0;
  /// Total neg-log score up to end_frame, LM score of `word` included.
  double score = 0.0;
  /// History after appending `word`.
  HistoryId history = kNoHistory;
  /// Lattice node the word starts from.
  int backpointer = 0;
  /// Score at `backpointer`.
  double entry_score = 0.0;
  /// ln p(word | previous history), plus ln p(</s> | history) at the final frame.
  double lm = 0.0;
};

/// One recombined word end: the kept candidate, the group score and all members.
struct RecombinedWordEnd {
  WordEndHypothesis best;
  double score = 0.0;
  std::vector<WordEndHypothesis> members;
};

/// Combines the scores of paths meeting in one state: -ln sum exp(-s) in fullsum
/// mode, the minimum otherwise.
double FullsumStep(std::span<const double> scores, SearchMode mode = SearchMode::kFullsum);

/// Merges candidates equal in (word, end frame, history) that differ in variant or
/// exit path. Scores must already include the variant prior. The merged entry keeps
/// the best candidate's fields; its score is combined by FullsumStep.
std::vector<WordEndHypothesis> MergePronunciationVariants(std::vector<WordEndHypothesis> ends,
                                                          SearchMode mode);

/// Groups word ends by the last n words of their history. The kept candidate is the
/// lowest score (ties: word id, then history id); the group score is its score in
/// Viterbi mode and the probability sum of all members in fullsum mode. Groups come
/// out ordered by their first member.
std::vector<RecombinedWordEnd> Recombine(std::span<const WordEndHypothesis> ends,
                                         const HistoryStore& store, int n,
                                         SearchMode mode = SearchMode::kViterbi);

struct DecodeStats {
  int frames = 0;
  /// Recombined word-end groups per frame boundary 1..T.
  std::vector<std::size_t> keys_per_frame;
  /// Within-word hypotheses surviving pruning per frame.
  std::vector<std::size_t> hyps_per_frame;
  std::size_t total_hyps = 0;
  std::size_t word_ends = 0;
  std::vector<BatchRecord> batches;
  std::size_t histories = 0;
  std::size_t forwards = 0;
  /// Per-history forward counts from the decode's history store.
  std::vector<int> forward_counts;
  double lm_simulated_ms = 0.0;
  double search_simulated_ms = 0.0;
  double SimulatedMs() const { return lm_simulated_ms + search_simulated_ms; }
};

struct DecodeResult {
  std::vector<std::string> words;
  std::vector<WordId> word_ids;
  double score = kInf;
  Lattice lattice;
  DecodeStats stats;
};

/// Time-synchronous tree-conditioned beam search. Throws SearchCollapsed when no
/// hypothesis survives a frame (including utterances shorter than any word), and
/// DataError when the lexicon uses states beyond the emission matrix.
DecodeResult Decode(const EmissionMatrix& emissions, const PrefixTree& tree, const LmScorer& scorer,
                    const HmmTopology& topology, const DecodeConfig& cfg);

}  // namespace rnnsearch
