// src/net/lookahead.cc

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

#include "rnnsearch/net/lookahead.hpp"

#include <algorithm>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/log_math.hpp"

namespace rnnsearch {

LookaheadTable ComputeLookahead(const PrefixTree& tree, const LmScorer& scorer,
                                std::span<const WordId> context) {
  if (!scorer.backoff()) throw ConfigError("lookahead needs a backoff model");
  const auto& nodes = tree.nodes();
  LookaheadTable table(nodes.size(), -kInf);
  std::unordered_map<WordId, double> word_scores;
  auto word_score = [&](WordId w) {
    auto it = word_scores.find(w);
    if (it == word_scores.end()) it = word_scores.emplace(w, scorer.BackoffScore(context, w)).first;
    return it->second;
  };
  for (std::size_t i = nodes.size(); i-- > 0;) {
    double best = -kInf;
    for (const auto& e : nodes[i].ends) best = std::max(best, word_score(e.word));
    for (int c : nodes[i].children) best = std::max(best, table[static_cast<std::size_t>(c)]);
    table[i] = best;
  }
  return table;
}

LookaheadCache::LookaheadCache(const PrefixTree& tree, const LmScorer& scorer,
                               std::size_t capacity)
    : tree_(tree), scorer_(scorer), capacity_(std::max<std::size_t>(capacity, 1)) {
  if (!scorer_.backoff()) zeros_ = std::make_shared<const LookaheadTable>(tree.size(), 0.0);
}

std::shared_ptr<const LookaheadTable> LookaheadCache::Get(std::span<const WordId> context) {
  if (zeros_) return zeros_;
  const std::size_t keep =
      std::min<std::size_t>(context.size(), static_cast<std::size_t>(scorer_.backoff()->order() - 1));
  Key key(context.end() - static_cast<std::ptrdiff_t>(keep), context.end());

  std::lock_guard lock(mu_);
  if (auto it = map_.find(key); it != map_.end()) {
    ++hits_;
    lru_.splice(lru_.begin(), lru_, it->second.lru);
    return it->second.table;
  }
  ++misses_;
  auto table = std::make_shared<const LookaheadTable>(ComputeLookahead(tree_, scorer_, key));
  lru_.push_front(key);
  map_.emplace(std::move(key), Slot{table, lru_.begin()});
  if (map_.size() > capacity_) {
    map_.erase(lru_.back());
    lru_.pop_back();
  }
  return table;
}

std::size_t LookaheadCache::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

}  // namespace rnnsearch
