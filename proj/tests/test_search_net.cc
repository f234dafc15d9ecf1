// tests/test_search_net.cc

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

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"

#include "instances.hpp"
#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/arpa.hpp"
#include "rnnsearch/net/lookahead.hpp"
#include "rnnsearch/net/prefix_tree.hpp"
#include "rnnsearch/net/topology.hpp"

using namespace rnnsearch;

namespace {

Vocabulary VocabOf(const Lexicon& lex) { return BuildVocabulary(&lex, nullptr, nullptr); }

/// Words ending at or below `node`, found by walking down the tree.
std::set<WordId> Descend(const PrefixTree& tree, int node) {
  std::set<WordId> out;
  std::function<void(int)> visit = [&](int n) {
    for (const auto& e : tree.node(n).ends) out.insert(e.word);
    for (int c : tree.node(n).children) visit(c);
  };
  visit(node);
  return out;
}

/// Words whose pronunciation starts with the state path leading to `node`.
std::set<WordId> ByPrefix(const PrefixTree& tree, const Lexicon& lex, const Vocabulary& vocab,
                          int node) {
  std::vector<int> path;
  for (int n = node; n != PrefixTree::kRoot; n = tree.node(n).parent) path.push_back(tree.node(n).state);
  std::reverse(path.begin(), path.end());
  std::set<WordId> out;
  for (const auto& w : lex.words) {
    for (const auto& p : w.variants) {
      if (p.states.size() >= path.size() && std::equal(path.begin(), path.end(), p.states.begin())) {
        out.insert(vocab.Id(w.word));
      }
    }
  }
  return out;
}

struct LookaheadSetup {
  Lexicon lexicon;
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const BackoffLm> backoff;
  std::unique_ptr<LmScorer> scorer;
  PrefixTree tree;
};

LookaheadSetup MakeLookaheadSetup(std::uint64_t seed, int words, int order) {
  synth::Rng rng(seed);
  LookaheadSetup s;
  s.lexicon = synth::RandomLexicon(rng, {words, 6, 1, 4, 0.3, false});
  s.backoff = std::make_shared<const BackoffLm>(
      synth::RandomBackoffLm(rng, synth::LexiconWords(s.lexicon), order));
  s.vocab = std::make_shared<const Vocabulary>(BuildVocabulary(&s.lexicon, s.backoff.get(), nullptr));
  s.scorer = std::make_unique<LmScorer>(s.vocab, s.backoff, nullptr);
  s.tree = BuildPrefixTree(s.lexicon, *s.vocab);
  return s;
}

}  // namespace

TEST_CASE("shared prefix") {
  const Lexicon lex = LoadLexicon("go\t1.0\t3\ngone\t1.0\t3 4\n");
  const Vocabulary vocab = VocabOf(lex);
  const PrefixTree tree = BuildPrefixTree(lex, vocab);
  CHECK(tree.size() == 3);
  const int n3 = tree.Walk(std::vector<int>{3});
  const int n34 = tree.Walk(std::vector<int>{3, 4});
  REQUIRE(n3 > 0);
  REQUIRE(n34 > 0);
  CHECK(tree.node(PrefixTree::kRoot).children == std::vector<int>{n3});
  CHECK(tree.node(n3).children == std::vector<int>{n34});
  REQUIRE(tree.node(n3).ends.size() == 1);
  CHECK(vocab.Word(tree.node(n3).ends[0].word) == "go");
  CHECK(tree.node(n3).reachable.size() == 2);
  CHECK(tree.node(n3).states_to_word_end == 0);
  CHECK(tree.node(PrefixTree::kRoot).states_to_word_end == 1);
  CHECK(tree.Walk(std::vector<int>{4}) == -1);
}

TEST_CASE("disjoint pronunciations form a star") {
  synth::Rng rng(1);
  const Lexicon lex = synth::RandomLexicon(rng, {5, 100, 1, 1, 0.0, true});
  const PrefixTree tree = BuildPrefixTree(lex, VocabOf(lex));
  CHECK(tree.size() == 6);
  CHECK(tree.node(PrefixTree::kRoot).children.size() == 5);
  for (int c : tree.node(PrefixTree::kRoot).children) CHECK(tree.node(c).children.empty());
}

TEST_CASE("random lexicon trees against brute-force descent") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    synth::Rng rng(seed);
    const Lexicon lex = synth::RandomLexicon(rng, {50, 6, 1, 5, 0.3, false});
    const Vocabulary vocab = VocabOf(lex);
    const PrefixTree tree = BuildPrefixTree(lex, vocab);
    std::size_t states = 0;
    for (const auto& w : lex.words) {
      for (std::size_t v = 0; v < w.variants.size(); ++v) {
        const auto& p = w.variants[v];
        states += p.states.size();
        const int n = tree.Walk(p.states);
        REQUIRE(n > 0);
        const auto& ends = tree.node(n).ends;
        CHECK(std::count_if(ends.begin(), ends.end(), [&](const TreeWordEnd& e) {
                return e.word == vocab.Id(w.word) && e.variant == static_cast<int>(v) &&
                       std::abs(e.log_prob - std::log(p.prob)) < 1e-12;
              }) == 1);
      }
    }
    CHECK(tree.size() <= states + 1);
    for (std::size_t n = 0; n < tree.size(); ++n) {
      const auto& node = tree.node(static_cast<int>(n));
      const std::set<WordId> reach(node.reachable.begin(), node.reachable.end());
      CHECK(reach == Descend(tree, static_cast<int>(n)));
      if (n != PrefixTree::kRoot) CHECK(reach == ByPrefix(tree, lex, vocab, static_cast<int>(n)));
      std::set<WordId> merged;
      for (const auto& e : node.ends) merged.insert(e.word);
      for (int c : node.children) {
        merged.insert(tree.node(c).reachable.begin(), tree.node(c).reachable.end());
        CHECK(tree.node(c).parent == static_cast<int>(n));
        CHECK(tree.node(c).depth == node.depth + 1);
      }
      CHECK(merged == reach);
      // Children of a node carry distinct states.
      std::set<int> child_states;
      for (int c : node.children) child_states.insert(tree.node(c).state);
      CHECK(child_states.size() == node.children.size());
    }
  }
}

TEST_CASE("transition scores") {
  HmmTopology zero;
  CHECK(TransitionScore(zero, 0) == 0.0);
  CHECK(TransitionScore(zero, 1) == 0.0);
  CHECK_THROWS_AS(TransitionScore(zero, 2), ConfigError);
  CHECK_THROWS_AS(TransitionScore(zero, 3), ConfigError);
  HmmTopology loop{1.0, 0.0, 0.0, false};
  CHECK(TransitionScore(loop, 0) == 1.0);
  HmmTopology skip{0.5, 0.25, 2.0, true};
  CHECK(TransitionScore(skip, 2) == 2.0);
  CHECK_THROWS_AS((HmmTopology{-1.0, 0.0, 0.0, false}).Validate(), ConfigError);
  CHECK_THROWS_AS((HmmTopology{0.0, std::nan(""), 0.0, false}).Validate(), ConfigError);
}

TEST_CASE("normalized topology") {
  const HmmTopology even = NormalizeTopology({1.0, 1.0, 0.0, false});
  CHECK(even.loop_penalty == doctest::Approx(-std::log(0.5)).epsilon(1e-15));
  CHECK(even.forward_penalty == doctest::Approx(-std::log(0.5)).epsilon(1e-15));
  CHECK_FALSE(even.skip_allowed);

  const HmmTopology no_skip = NormalizeTopology({0.0, 0.0, 5.0, false});
  CHECK_FALSE(no_skip.skip_allowed);
  CHECK_THROWS_AS(TransitionScore(no_skip, 2), ConfigError);

  const HmmTopology three = NormalizeTopology({1.0, 2.0, 3.0, true});
  const double sum = std::exp(-three.loop_penalty) + std::exp(-three.forward_penalty) +
                     std::exp(-three.skip_penalty);
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  // Ratios between the options are preserved.
  CHECK(three.forward_penalty - three.loop_penalty == doctest::Approx(1.0));
  CHECK(three.skip_penalty - three.forward_penalty == doctest::Approx(1.0));
}

TEST_CASE("lookahead of a two-word node") {
  const Lexicon lex = LoadLexicon("a\t1.0\t0 1\nb\t1.0\t0 2\n");
  auto lm = std::make_shared<const BackoffLm>(LoadArpa(
      "\\data\\\nngram 1=4\n\n\\1-grams:\n-99 <s>\n" + std::to_string(std::log10(0.3)) + " </s>\n" +
      std::to_string(std::log10(0.2)) + " a\n" + std::to_string(std::log10(0.5)) + " b\n\n\\end\\\n"));
  auto vocab = std::make_shared<const Vocabulary>(BuildVocabulary(&lex, lm.get(), nullptr));
  const LmScorer scorer(vocab, lm, nullptr);
  const PrefixTree tree = BuildPrefixTree(lex, *vocab);
  const auto table = ComputeLookahead(tree, scorer, std::vector<WordId>{scorer.sentence_begin()});
  const int shared = tree.Walk(std::vector<int>{0});
  CHECK(table[static_cast<std::size_t>(shared)] == doctest::Approx(std::log(0.5)).epsilon(1e-6));
  CHECK(table[static_cast<std::size_t>(tree.Walk(std::vector<int>{0, 1}))] ==
        doctest::Approx(std::log(0.2)).epsilon(1e-6));
}

TEST_CASE("lookahead tables against enumeration") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = MakeLookaheadSetup(seed, 30, 3);
    synth::Rng rng(seed + 100);
    const auto& norm = s.scorer->normalization_set();
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<WordId> ctx{s.scorer->sentence_begin()};
      for (int k = 0; k < trial % 3; ++k) {
        WordId w = norm[rng() % norm.size()];
        if (w != s.scorer->sentence_end()) ctx.push_back(w);
      }
      const auto table = ComputeLookahead(s.tree, *s.scorer, ctx);
      REQUIRE(table.size() == s.tree.size());
      for (std::size_t n = 0; n < s.tree.size(); ++n) {
        const auto& node = s.tree.node(static_cast<int>(n));
        double best = -kInf;
        for (WordId w : Descend(s.tree, static_cast<int>(n))) {
          const double score = s.scorer->BackoffScore(ctx, w);
          best = std::max(best, score);
          CHECK(table[n] >= score);
        }
        CHECK(table[n] == best);
        double from_children = -kInf;
        for (const auto& e : node.ends) from_children = std::max(from_children, s.scorer->BackoffScore(ctx, e.word));
        for (int c : node.children) from_children = std::max(from_children, table[static_cast<std::size_t>(c)]);
        CHECK(table[n] == from_children);
        if (node.children.empty() && node.ends.size() == 1) {
          CHECK(table[n] == s.scorer->BackoffScore(ctx, node.ends[0].word));
        }
      }
    }
  }
}

TEST_CASE("lookahead cache") {
  const auto s = MakeLookaheadSetup(3, 10, 2);
  LookaheadCache cache(s.tree, *s.scorer, 2);
  const WordId bos = s.scorer->sentence_begin();
  const WordId w0 = s.vocab->Id("w0");
  const WordId w1 = s.vocab->Id("w1");
  const WordId w2 = s.vocab->Id("w2");
  const auto t0 = cache.Get(std::vector<WordId>{bos, w0});
  // Bigram lookahead only depends on the last word.
  CHECK(cache.Get(std::vector<WordId>{bos, w1, w0}) == t0);
  CHECK(cache.hits() == 1);
  CHECK(*t0 == ComputeLookahead(s.tree, *s.scorer, std::vector<WordId>{w0}));
  cache.Get(std::vector<WordId>{w1});
  cache.Get(std::vector<WordId>{w2});
  CHECK(cache.size() == 2);
  // w0 was least recently used and has been evicted.
  const std::size_t misses = cache.misses();
  cache.Get(std::vector<WordId>{w0});
  CHECK(cache.misses() == misses + 1);

  auto inst = testing::MakeSmallInstance(2);
  testing::Models& m = inst.models;
  testing::FinishModels(&m, nullptr, m.recurrent);
  LookaheadCache none(m.tree, *m.scorer);
  const auto zeros = none.Get(std::vector<WordId>{m.scorer->sentence_begin()});
  CHECK(zeros->size() == m.tree.size());
  CHECK(std::all_of(zeros->begin(), zeros->end(), [](double v) { return v == 0.0; }));
}
