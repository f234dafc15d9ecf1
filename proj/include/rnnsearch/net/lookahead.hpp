// include/rnnsearch/net/lookahead.hpp

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
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "rnnsearch/io/vocabulary.hpp"
#include "rnnsearch/lm/scorer.hpp"
#include "rnnsearch/net/prefix_tree.hpp"

namespace rnnsearch {

/// Per-node ln lookahead scores for one LM context, indexed by tree node.
using LookaheadTable = std::vector<double>;

/// Value at each node is the best backoff ln p(w | context) over the words reachable
/// from it. The scorer must have a backoff model.
LookaheadTable ComputeLookahead(const PrefixTree& tree, const LmScorer& scorer,
                                std::span<const WordId> context);

/// LRU cache of lookahead tables keyed by the context truncated to order-1 words.
/// Without a backoff model every table is all zeros.
class LookaheadCache {
 public:
  LookaheadCache(const PrefixTree& tree, const LmScorer& scorer, std::size_t capacity = 10000);

  std::shared_ptr<const LookaheadTable> Get(std::span<const WordId> context);

  std::size_t size() const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  using Key = std::vector<WordId>;
  struct Slot {
    std::shared_ptr<const LookaheadTable> table;
    std::list<Key>::iterator lru;
  };

  const PrefixTree& tree_;
  const LmScorer& scorer_;
  std::size_t capacity_;
  std::shared_ptr<const LookaheadTable> zeros_;
  mutable std::mutex mu_;
  std::list<Key> lru_;
  std::unordered_map<Key, Slot, WordSeqHash> map_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace rnnsearch
