// src/lm/history.cc

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

#include "rnnsearch/lm/history.hpp"

#include <mutex>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/lm/scorer.hpp"

namespace rnnsearch {

LmHistory RnnStep(const RecurrentLm& lm, const LmHistory& h, WordId word, int rnn_input) {
  LmHistory out;
  out.parent = h.id;
  out.words = h.words;
  out.words.push_back(word);
  lm.Step(h.state, rnn_input, &out.state, &out.log_dist);
  out.forwarded = true;
  return out;
}

std::span<const WordId> RecombinationKey(const LmHistory& h, int n) {
  std::span<const WordId> all(h.words);
  if (n == kUnlimited || n < 0 || static_cast<std::size_t>(n) >= all.size()) return all;
  return all.last(static_cast<std::size_t>(n));
}

HistoryStore::HistoryStore(const LmScorer& scorer) : scorer_(scorer) {}

HistoryId HistoryStore::Intern(std::vector<WordId> words, HistoryId parent) {
  {
    std::shared_lock lock(mu_);
    if (auto it = index_.find(words); it != index_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  if (auto it = index_.find(words); it != index_.end()) return it->second;
  auto id = static_cast<HistoryId>(histories_.size());
  LmHistory& h = histories_.emplace_back();
  h.id = id;
  h.parent = parent;
  h.words = words;
  h.forwarded = scorer_.recurrent() == nullptr;
  forward_counts_.push_back(0);
  index_.emplace(std::move(words), id);
  return id;
}

HistoryId HistoryStore::Initial() {
  HistoryId id = Intern({scorer_.sentence_begin()}, kNoHistory);
  if (const RecurrentLm* rnn = scorer_.recurrent()) {
    std::unique_lock lock(mu_);
    LmHistory& h = histories_[id];
    if (!h.forwarded) {
      rnn->Step(rnn->ZeroState(), scorer_.RecurrentId(scorer_.sentence_begin()), &h.state,
                &h.log_dist);
      h.forwarded = true;
      ++forward_counts_[id];
      ++forwards_;
    }
  }
  return id;
}

HistoryId HistoryStore::Extend(HistoryId h, WordId word) {
  std::vector<WordId> words;
  {
    std::shared_lock lock(mu_);
    words.reserve(histories_.at(h).words.size() + 1);
    words = histories_[h].words;
  }
  words.push_back(word);
  return Intern(std::move(words), h);
}

const LmHistory& HistoryStore::Get(HistoryId id) const {
  std::shared_lock lock(mu_);
  return histories_.at(id);
}

bool HistoryStore::NeedsForward(HistoryId id) const {
  std::shared_lock lock(mu_);
  return !histories_.at(id).forwarded;
}

std::size_t HistoryStore::Forward(std::span<const HistoryId> batch) {
  const RecurrentLm* rnn = scorer_.recurrent();
  if (!rnn) return 0;
  std::unique_lock lock(mu_);
  std::size_t computed = 0;
  for (HistoryId id : batch) {
    LmHistory& h = histories_.at(id);
    if (h.forwarded) continue;
    if (h.parent == kNoHistory) throw DataError("history without parent cannot be forwarded");
    const LmHistory& parent = histories_.at(h.parent);
    if (!parent.forwarded) throw DataError("parent history has not been forwarded");
    rnn->Step(parent.state, scorer_.RecurrentId(h.words.back()), &h.state, &h.log_dist);
    h.forwarded = true;
    ++forward_counts_[id];
    ++forwards_;
    ++computed;
  }
  return computed;
}

void HistoryStore::EnsureForwarded(HistoryId id) {
  if (!NeedsForward(id)) return;
  // Walk up to the nearest forwarded ancestor, then forward top-down.
  std::vector<HistoryId> chain;
  for (HistoryId cur = id; cur != kNoHistory && NeedsForward(cur); cur = Get(cur).parent) {
    chain.push_back(cur);
  }
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    HistoryId one = *it;
    Forward(std::span<const HistoryId>(&one, 1));
  }
}

std::size_t HistoryStore::size() const {
  std::shared_lock lock(mu_);
  return histories_.size();
}

std::size_t HistoryStore::forward_count() const {
  std::shared_lock lock(mu_);
  return forwards_;
}

std::vector<int> HistoryStore::ForwardCounts() const {
  std::shared_lock lock(mu_);
  return forward_counts_;
}

}  // namespace rnnsearch
