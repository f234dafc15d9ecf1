// include/rnnsearch/lm/history.hpp

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

#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "rnnsearch/io/vocabulary.hpp"
#include "rnnsearch/lm/recurrent_lm.hpp"

namespace rnnsearch {

class LmScorer;

using HistoryId = std::uint32_t;
inline constexpr HistoryId kNoHistory = std::numeric_limits<HistoryId>::max();

/// Recombination limit meaning "never recombine on a truncated context".
inline constexpr int kUnlimited = std::numeric_limits<int>::max();

/// Opaque LM history: the word sequence (starting with <s>) and, for recurrent
/// models, the layer state after consuming the last word plus the cached
/// distribution over the next word.
struct LmHistory {
  HistoryId id = kNoHistory;
  HistoryId parent = kNoHistory;
  std::vector<WordId> words;
  RecurrentLm::State state;
  std::vector<double> log_dist;
  bool forwarded = false;
};

/// One recurrent step: appends `word` to h and computes the new state and
/// distribution. `rnn_input` is the recurrent model's id for `word`.
LmHistory RnnStep(const RecurrentLm& lm, const LmHistory& h, WordId word, int rnn_input);
/// Identity-vocabulary convenience overload.
inline LmHistory RnnStep(const RecurrentLm& lm, const LmHistory& h, WordId word) {
  return RnnStep(lm, h, word, word);
}

/// The last n words of the history (all of them when shorter or n is kUnlimited).
std::span<const WordId> RecombinationKey(const LmHistory& h, int n);

/// Interning cache of histories keyed by word sequence. Equal word sequences map
/// to the same history, so a distribution is computed at most once per sequence.
/// Lookups and inserts are safe from several threads.
class HistoryStore {
 public:
  explicit HistoryStore(const LmScorer& scorer);
  HistoryStore(const HistoryStore&) = delete;
  HistoryStore& operator=(const HistoryStore&) = delete;

  /// The [<s>] history, already forwarded.
  HistoryId Initial();
  /// Interns h + word without forwarding it.
  HistoryId Extend(HistoryId h, WordId word);
  const LmHistory& Get(HistoryId id) const;

  /// True when the scorer has a recurrent model and `id` has not been forwarded.
  bool NeedsForward(HistoryId id) const;
  /// Forwards every listed history that still needs it. Parents must already be
  /// forwarded. Returns the number of histories actually computed.
  std::size_t Forward(std::span<const HistoryId> batch);
  void EnsureForwarded(HistoryId id);

  std::size_t size() const;
  /// Total number of recurrent steps computed by this store.
  std::size_t forward_count() const;
  /// Forward counts per history id; every entry is 0 or 1.
  std::vector<int> ForwardCounts() const;
  const LmScorer& scorer() const { return scorer_; }

 private:
  HistoryId Intern(std::vector<WordId> words, HistoryId parent);

  const LmScorer& scorer_;
  mutable std::shared_mutex mu_;
  std::deque<LmHistory> histories_;
  std::unordered_map<std::vector<WordId>, HistoryId, WordSeqHash> index_;
  std::vector<int> forward_counts_;
  std::size_t forwards_ = 0;
};

}  // namespace rnnsearch
