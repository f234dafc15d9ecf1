// include/rnnsearch/net/prefix_tree.hpp

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

#include <span>
#include <vector>

#include "rnnsearch/io/lexicon.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

/// A word (pronunciation variant) whose last state is a given tree node.
struct TreeWordEnd {
  WordId word = 0;
  int variant = 0;
  /// ln of the variant probability.
  double log_prob = 0.0;
};

/// Pronunciation prefix tree. Node 0 is the root and carries no emission state;
/// every other node is one HMM state of one or more pronunciations sharing a prefix.
class PrefixTree {
 public:
  struct Node {
    int state = -1;
    int parent = -1;
    int depth = 0;
    std::vector<int> children;
    std::vector<TreeWordEnd> ends;
    /// Sorted, duplicate-free ids of every word ending at or below this node.
    std::vector<WordId> reachable;
    /// Fewest further states until a word end (0 when words end here).
    int states_to_word_end = 0;
  };

  static constexpr int kRoot = 0;

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }
  int MaxState() const { return max_state_; }

  /// Node reached by following `states` from the root, or -1.
  int Walk(std::span<const int> states) const;

 private:
  friend PrefixTree BuildPrefixTree(const Lexicon& lexicon, const Vocabulary& vocab);
  std::vector<Node> nodes_;
  int max_state_ = -1;
};

/// Words are mapped through `vocab` (throws DataError for words it lacks).
PrefixTree BuildPrefixTree(const Lexicon& lexicon, const Vocabulary& vocab);

}  // namespace rnnsearch
