// tests/test_lattice_ops.cc

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

#include "doctest.h"

#include "instances.hpp"
#include "rnnsearch/errors.hpp"
#include "rnnsearch/lattice/lattice_ops.hpp"

using namespace rnnsearch;

namespace {

std::vector<std::vector<int>> EnumeratePaths(const Lattice& lat) {
  const auto out = lat.OutgoingArcs();
  const auto finals = lat.FinalNodes();
  std::vector<std::vector<int>> paths;
  std::vector<int> current;
  std::function<void(int)> walk = [&](int node) {
    if (std::find(finals.begin(), finals.end(), node) != finals.end()) paths.push_back(current);
    for (int a : out[static_cast<std::size_t>(node)]) {
      current.push_back(a);
      walk(lat.arcs[static_cast<std::size_t>(a)].end);
      current.pop_back();
    }
  };
  walk(lat.initial());
  return paths;
}

double PathScore(const Lattice& lat, const std::vector<int>& path, double sa, double sl) {
  double s = 0.0;
  for (int a : path) s += sa * lat.arcs[static_cast<std::size_t>(a)].am + sl * lat.arcs[static_cast<std::size_t>(a)].lm;
  return s;
}

std::vector<std::string> PathWords(const Lattice& lat, const std::vector<int>& path) {
  std::vector<std::string> w;
  for (int a : path) w.push_back(lat.arcs[static_cast<std::size_t>(a)].word);
  return w;
}

/// Sentence log probability from scratch, sentence end included.
double SentenceLogProb(const LmScorer& scorer, const std::vector<std::string>& words) {
  HistoryStore store(scorer);
  HistoryId h = store.Initial();
  double lp = 0.0;
  for (const auto& s : words) {
    const WordId w = scorer.vocab().Id(s);
    store.EnsureForwarded(h);
    lp += scorer.Score(store.Get(h), w);
    h = store.Extend(h, w);
  }
  store.EnsureForwarded(h);
  return lp + scorer.Score(store.Get(h), scorer.sentence_end());
}

testing::Models WordModels(std::uint64_t seed, int words) {
  synth::Rng rng(seed);
  testing::Models m;
  m.lexicon = synth::RandomLexicon(rng, {words, 6, 1, 3, 0.0, false});
  const auto names = synth::LexiconWords(m.lexicon);
  testing::FinishModels(&m, std::make_shared<const BackoffLm>(synth::RandomBackoffLm(rng, names, 2)),
                        std::make_shared<const RecurrentLm>(
                            synth::RandomRecurrentLm(rng, names, CellType::kElman, 1, 3, 3, 1.0)));
  return m;
}

Lattice Linear(const std::vector<std::string>& words, const std::vector<double>& am) {
  Lattice lat;
  lat.utterance_id = "linear";
  for (std::size_t i = 0; i <= words.size(); ++i) lat.nodes.push_back({static_cast<int>(3 * i), ""});
  for (std::size_t i = 0; i < words.size(); ++i) {
    lat.arcs.push_back({static_cast<int>(i), static_cast<int>(i + 1), words[i], 0, am[i], -1.0});
  }
  return lat;
}

Lattice Diamond(const std::string& upper, const std::string& lower, double up_lm, double low_lm) {
  Lattice lat;
  lat.utterance_id = "diamond";
  lat.nodes = {{0, ""}, {4, ""}, {6, ""}, {10, ""}};
  lat.arcs = {{0, 1, upper, 0, -3.0, up_lm}, {0, 2, lower, 0, -3.0, low_lm},
              {1, 3, "end", 0, -2.0, 0.0}, {2, 3, "end", 0, -2.0, 0.0}};
  return lat;
}

}  // namespace

TEST_CASE("best path") {
  const Lattice one = Linear({"a", "b", "c"}, {-1.0, -2.0, -3.0});
  const auto p = LatticeBestPath(one, 1.0, 1.0);
  CHECK(p.words == std::vector<std::string>{"a", "b", "c"});
  CHECK(p.score == doctest::Approx(-9.0));

  Lattice two;
  two.nodes = {{0, ""}, {5, ""}};
  two.arcs = {{0, 1, "slow", 0, -4.0, -3.0}, {0, 1, "fast", 0, -2.0, -3.0}};
  const auto q = LatticeBestPath(two, 1.0, 1.0);
  CHECK(q.words == std::vector<std::string>{"fast"});
  CHECK(q.score == -5.0);

  synth::Rng rng(3);
  const std::vector<std::string> words{"a", "b", "c", "d"};
  for (int trial = 0; trial < 30; ++trial) {
    const Lattice lat = testing::RandomLattice(rng, 20, 40, 12, words);
    const auto paths = EnumeratePaths(lat);
    REQUIRE(static_cast<double>(paths.size()) == lat.CountPaths());
    REQUIRE(paths.size() <= 10000);
    const double sa = 0.5 + trial % 3;
    double best = -kInf;
    for (const auto& path : paths) best = std::max(best, PathScore(lat, path, sa, 1.0));
    const auto got = LatticeBestPath(lat, sa, 1.0);
    CHECK(got.score == doctest::Approx(best).epsilon(1e-12));
    CHECK(PathScore(lat, got.arcs, sa, 1.0) == doctest::Approx(best).epsilon(1e-12));
    CHECK(PathWords(lat, got.arcs) == got.words);
  }
}

TEST_CASE("forward-backward posteriors") {
  const Lattice one = Linear({"a", "b"}, {-1.0, -2.0});
  for (double p : ForwardBackward(one, 1.0, 1.0)) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));

  const Lattice even = Diamond("x", "y", -1.0, -1.0);
  const auto post = ForwardBackward(even, 1.0, 1.0);
  CHECK(post[0] == doctest::Approx(0.5));
  CHECK(post[1] == doctest::Approx(0.5));
  CHECK(post[2] == doctest::Approx(0.5));

  // Against path enumeration, including a posterior scale.
  synth::Rng rng(11);
  const std::vector<std::string> words{"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    const Lattice lat = testing::RandomLattice(rng, 4 + trial % 12, 30, trial % 15, words);
    const double scale = trial % 2 == 0 ? 1.0 : 0.3;
    const auto got = ForwardBackward(lat, 1.0, 0.8, scale);
    REQUIRE(got.size() == lat.arcs.size());
    // Every frame cut is crossed by each path exactly once.
    for (int f = 0; f < lat.FinalFrame(); ++f) {
      double sum = 0.0;
      for (std::size_t a = 0; a < lat.arcs.size(); ++a) {
        const auto& arc = lat.arcs[a];
        if (lat.nodes[static_cast<std::size_t>(arc.start)].frame <= f &&
            f < lat.nodes[static_cast<std::size_t>(arc.end)].frame) {
          sum += got[a];
        }
      }
      CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
    const auto paths = EnumeratePaths(lat);
    double total = kInf;
    for (const auto& p : paths) total = NegLogAdd(total, -scale * PathScore(lat, p, 1.0, 0.8));
    std::vector<double> expected(lat.arcs.size(), 0.0);
    for (const auto& p : paths) {
      const double w = std::exp(scale * PathScore(lat, p, 1.0, 0.8) + total);
      for (int a : p) expected[static_cast<std::size_t>(a)] += w;
    }
    for (std::size_t a = 0; a < expected.size(); ++a) CHECK(got[a] == doctest::Approx(expected[a]).epsilon(1e-9));
  }
}

TEST_CASE("push-forward rescoring of simple lattices") {
  const auto m = WordModels(5, 4);
  const auto names = synth::LexiconWords(m.lexicon);
  RescoreConfig cfg;
  cfg.k = kUnlimitedHistories;

  const Lattice line = Linear({names[0], names[2], names[1]}, {-1.0, -2.0, -0.5});
  const auto r = PushForwardRescore(line, *m.scorer, cfg);
  CHECK(r.best.words == PathWords(line, {0, 1, 2}));
  CHECK(r.best.score == doctest::Approx(-3.5 + SentenceLogProb(*m.scorer, r.best.words)).epsilon(1e-12));
  CHECK(r.max_histories == 1);
  double lm = 0.0;
  for (const auto& arc : r.lattice.arcs) lm += arc.lm;
  CHECK(lm == doctest::Approx(SentenceLogProb(*m.scorer, r.best.words)).epsilon(1e-12));

  // Two spellings of the same words at different times collapse to one history.
  Lattice same = Diamond(names[0], names[0], -1.0, -1.0);
  for (auto& arc : same.arcs) {
    if (arc.word == "end") arc.word = names[3];
  }
  cfg.k = 1;
  const auto one = PushForwardRescore(same, *m.scorer, cfg);
  CHECK(one.max_histories == 1);
  CHECK(one.best.score == doctest::Approx(-5.0 + SentenceLogProb(*m.scorer, {names[0], names[3]})).epsilon(1e-12));

  // Distinct words: both histories meet at the last node.
  Lattice diamond = Diamond(names[0], names[1], -1.0, -1.0);
  for (auto& arc : diamond.arcs) {
    if (arc.word == "end") arc.word = names[2];
  }
  cfg.k = kUnlimitedHistories;
  const auto both = PushForwardRescore(diamond, *m.scorer, cfg);
  CHECK(both.max_histories == 2);
  const double up = SentenceLogProb(*m.scorer, {names[0], names[2]});
  const double low = SentenceLogProb(*m.scorer, {names[1], names[2]});
  CHECK(both.best.score == doctest::Approx(-5.0 + std::max(up, low)).epsilon(1e-12));
  CHECK(both.best.words[0] == (up > low ? names[0] : names[1]));

  cfg.k = 0;
  CHECK_THROWS_AS(PushForwardRescore(diamond, *m.scorer, cfg), ConfigError);
  cfg.k = 4;
  cfg.beam = 0.0;
  CHECK_THROWS_AS(PushForwardRescore(diamond, *m.scorer, cfg), ConfigError);
}

TEST_CASE("push-forward rescoring against path enumeration") {
  synth::Rng rng(17);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto m = WordModels(seed, 4);
    const auto names = synth::LexiconWords(m.lexicon);
    const Lattice lat = testing::RandomLattice(rng, 5 + static_cast<int>(seed % 8), 30, static_cast<int>(seed % 10), names);
    const auto paths = EnumeratePaths(lat);
    REQUIRE(paths.size() <= 10000);
    RescoreConfig cfg;
    cfg.k = kUnlimitedHistories;
    cfg.scale_am = 0.7;
    cfg.scale_lm = 1.3;
    double best = -kInf;
    std::vector<std::string> best_words;
    for (const auto& p : paths) {
      double am = 0.0;
      for (int a : p) am += lat.arcs[static_cast<std::size_t>(a)].am;
      const auto words = PathWords(lat, p);
      const double s = cfg.scale_am * am + cfg.scale_lm * SentenceLogProb(*m.scorer, words);
      if (s > best) {
        best = s;
        best_words = words;
      }
    }
    const auto r = PushForwardRescore(lat, *m.scorer, cfg);
    CHECK(r.best.score == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.best.words == best_words);
    // The rescored lattice agrees with the returned best path.
    const auto again = LatticeBestPath(r.lattice, cfg.scale_am, cfg.scale_lm);
    CHECK(again.score == doctest::Approx(best).epsilon(1e-12));
    // Pruned runs can only do worse.
    cfg.k = 1;
    const auto narrow = PushForwardRescore(lat, *m.scorer, cfg);
    CHECK(narrow.best.score <= best + 1e-12);
    CHECK(narrow.max_histories == 1);
  }
}

TEST_CASE("two-pass decoding matches one-pass exact decoding") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto inst = testing::MakeSmallInstance(seed);
    auto& m = inst.models;
    const auto one = Decode(inst.emissions, m.tree, *m.scorer, m.topology, inst.cfg);
    auto n2 = inst.cfg;
    n2.recombination_n = 2;
    const auto two = Decode(inst.emissions, m.tree, *m.scorer, m.topology, n2);
    RescoreConfig rc;
    rc.k = kUnlimitedHistories;
    rc.scale_am = inst.cfg.scale_am;
    rc.scale_lm = inst.cfg.scale_lm;
    const auto r = PushForwardRescore(two.lattice, *m.scorer, rc);
    CHECK(r.best.words == one.words);
    CHECK(std::abs(r.best.score + one.score) <= 1e-6);
  }
}

TEST_CASE("confusion networks") {
  Lattice pair;
  pair.nodes = {{0, ""}, {5, ""}};
  pair.arcs = {{0, 1, "a", 0, 0.0, std::log(0.6)}, {0, 1, "b", 0, 0.0, std::log(0.4)}};
  const auto pp = ForwardBackward(pair, 1.0, 1.0);
  const auto cn = BuildConfusionNetwork(pair, pp, 1.0, 1.0);
  REQUIRE(cn.slots.size() == 1);
  REQUIRE(cn.slots[0].entries.size() == 2);
  CHECK(cn.slots[0].entries[0].first == "a");
  CHECK(cn.slots[0].entries[0].second == doctest::Approx(0.6));
  CHECK(cn.slots[0].entries[1].first == "b");
  CHECK(cn.slots[0].entries[1].second == doctest::Approx(0.4));
  CHECK(CnDecode(cn) == std::vector<std::string>{"a"});

  const Lattice line = Linear({"x", "y", "z"}, {-1.0, -1.0, -1.0});
  const auto lcn = BuildConfusionNetwork(line, ForwardBackward(line, 1.0, 1.0), 1.0, 1.0);
  CHECK(lcn.slots.size() == 3);
  CHECK(CnDecode(lcn) == std::vector<std::string>{"x", "y", "z"});

  const Lattice fixture = ReadLatticeFile(std::string(RNNSEARCH_FIXTURES) + "/cn4.lat");
  CHECK(LatticeBestPath(fixture, 1.0, 1.0).words == std::vector<std::string>{"x", "a"});
  const auto fp = ForwardBackward(fixture, 1.0, 1.0);
  const auto fcn = BuildConfusionNetwork(fixture, fp, 1.0, 1.0);
  CHECK(CnDecode(fcn) == std::vector<std::string>{"y", "a"});
  REQUIRE(fcn.slots.size() == 2);
  CHECK(fcn.slots[0].entries[0].second == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(fcn.slots[1].entries[0].first == "a");
  CHECK(fcn.slots[1].entries[0].second == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("confusion network slots are normalized") {
  synth::Rng rng(23);
  const std::vector<std::string> words{"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 50; ++trial) {
    const Lattice lat = testing::RandomLattice(rng, 3 + trial % 15, 40, trial % 20, words);
    const auto post = ForwardBackward(lat, 0.1, 1.0);
    const auto cn = BuildConfusionNetwork(lat, post, 0.1, 1.0);
    int previous_end = 0;
    for (const auto& slot : cn.slots) {
      double sum = 0.0;
      for (const auto& [w, p] : slot.entries) {
        CHECK(p >= -1e-12);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-6);
      CHECK(std::is_sorted(slot.entries.begin(), slot.entries.end(),
                           [](const auto& x, const auto& y) { return x.second > y.second; }));
      CHECK(slot.start_frame >= previous_end);
      previous_end = slot.end_frame;
    }
    // Posterior mass of every real arc lands in some slot.
    double arc_mass = 0.0;
    for (double p : post) arc_mass += p;
    double word_mass = 0.0;
    for (const auto& slot : cn.slots) {
      for (const auto& [w, p] : slot.entries) {
        if (w != kEpsilon) word_mass += p;
      }
    }
    CHECK(word_mass == doctest::Approx(arc_mass).epsilon(1e-9));
  }
}
