// src/net/prefix_tree.cc

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

#include "rnnsearch/net/prefix_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rnnsearch {

int PrefixTree::Walk(std::span<const int> states) const {
  int cur = kRoot;
  for (int s : states) {
    int next = -1;
    for (int c : node(cur).children) {
      if (node(c).state == s) {
        next = c;
        break;
      }
    }
    if (next < 0) return -1;
    cur = next;
  }
  return cur;
}

PrefixTree BuildPrefixTree(const Lexicon& lexicon, const Vocabulary& vocab) {
  PrefixTree tree;
  auto& nodes = tree.nodes_;
  nodes.emplace_back();

  for (const auto& entry : lexicon.words) {
    const WordId word = vocab.Id(entry.word);
    for (std::size_t v = 0; v < entry.variants.size(); ++v) {
      const auto& pron = entry.variants[v];
      int cur = PrefixTree::kRoot;
      for (int s : pron.states) {
        int next = -1;
        for (int c : nodes[static_cast<std::size_t>(cur)].children) {
          if (nodes[static_cast<std::size_t>(c)].state == s) {
            next = c;
            break;
          }
        }
        if (next < 0) {
          next = static_cast<int>(nodes.size());
          PrefixTree::Node n;
          n.state = s;
          n.parent = cur;
          n.depth = nodes[static_cast<std::size_t>(cur)].depth + 1;
          nodes.push_back(std::move(n));
          nodes[static_cast<std::size_t>(cur)].children.push_back(next);
        }
        cur = next;
        tree.max_state_ = std::max(tree.max_state_, s);
      }
      nodes[static_cast<std::size_t>(cur)].ends.push_back(
          TreeWordEnd{word, static_cast<int>(v), std::log(pron.prob)});
    }
  }

  // Children always have larger indices than their parent, so a reverse sweep is
  // a valid bottom-up order.
  for (std::size_t i = nodes.size(); i-- > 0;) {
    auto& n = nodes[i];
    std::vector<WordId> reach;
    for (const auto& e : n.ends) reach.push_back(e.word);
    int dist = n.ends.empty() ? std::numeric_limits<int>::max() : 0;
    for (int c : n.children) {
      const auto& child = nodes[static_cast<std::size_t>(c)];
      reach.insert(reach.end(), child.reachable.begin(), child.reachable.end());
      if (child.states_to_word_end != std::numeric_limits<int>::max()) {
        dist = std::min(dist, child.states_to_word_end + 1);
      }
    }
    std::sort(reach.begin(), reach.end());
    reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
    n.reachable = std::move(reach);
    n.states_to_word_end = dist;
  }
  return tree;
}

}  // namespace rnnsearch
