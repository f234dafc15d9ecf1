// tests/support/instances.cc

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

#include "instances.hpp"

#include <algorithm>

namespace rnnsearch::testing {

void FinishModels(Models* m, std::shared_ptr<const BackoffLm> backoff,
                  std::shared_ptr<const RecurrentLm> recurrent, InterpolationConfig cfg) {
  m->backoff = std::move(backoff);
  m->recurrent = std::move(recurrent);
  m->vocab = std::make_shared<const Vocabulary>(
      BuildVocabulary(&m->lexicon, m->backoff.get(), m->recurrent.get()));
  m->scorer = std::make_unique<LmScorer>(m->vocab, m->backoff, m->recurrent, cfg);
  m->tree = BuildPrefixTree(m->lexicon, *m->vocab);
}

SmallInstance MakeSmallInstance(std::uint64_t seed) {
  synth::Rng rng(seed);
  SmallInstance inst;
  Models& m = inst.models;
  std::uniform_int_distribution<int> nwords(3, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  synth::LexiconSpec spec;
  spec.words = nwords(rng);
  spec.states = 14;
  spec.min_length = 8;
  spec.max_length = 10;
  spec.second_variant = 0.3;
  m.lexicon = synth::RandomLexicon(rng, spec);
  m.states = spec.states;

  const auto words = synth::LexiconWords(m.lexicon);
  auto backoff = std::make_shared<const BackoffLm>(synth::RandomBackoffLm(rng, words, 2));
  auto rnn = std::make_shared<const RecurrentLm>(
      synth::RandomRecurrentLm(rng, words, CellType::kElman, 1, 2, 2, 1.0));
  FinishModels(&m, backoff, rnn);

  const int count = std::uniform_int_distribution<int>(1, 3)(rng);
  inst.plan = synth::RandomPlan(rng, m.lexicon, count, 1);
  synth::EmissionSpec es;
  inst.emissions = synth::PlantEmissions(rng, m.lexicon, inst.plan, m.states, es,
                                         "inst" + std::to_string(seed));

  m.topology.loop_penalty = unit(rng);
  m.topology.forward_penalty = unit(rng);
  m.topology.skip_penalty = 1.0 + unit(rng);
  m.topology.skip_allowed = unit(rng) < 0.5;
  if (m.topology.skip_allowed) {
    int shortest = 1 << 30;
    for (const auto& w : m.lexicon.words) {
      for (const auto& p : w.variants) {
        shortest = std::min(shortest, static_cast<int>(p.states.size() + 1) / 2);
      }
    }
    if (inst.emissions.frames() / shortest > inst.max_words) m.topology.skip_allowed = false;
  }

  inst.cfg.scale_am = 1.0;
  inst.cfg.scale_lm = 0.5 + 1.5 * unit(rng);
  return inst;
}

Lattice RandomLattice(synth::Rng& rng, int nodes, int frames, int extra_arcs,
                      const std::vector<std::string>& words) {
  // Node 0 at frame 0, last node at `frames`, the rest at distinct inner frames.
  std::vector<int> inner;
  for (int f = 1; f < frames; ++f) inner.push_back(f);
  std::shuffle(inner.begin(), inner.end(), rng);
  inner.resize(static_cast<std::size_t>(std::min<int>(nodes - 2, static_cast<int>(inner.size()))));
  std::sort(inner.begin(), inner.end());

  Lattice lat;
  lat.utterance_id = "random";
  lat.nodes.push_back({0, ""});
  for (int f : inner) lat.nodes.push_back({f, ""});
  lat.nodes.push_back({frames, ""});
  const int n = static_cast<int>(lat.nodes.size());

  std::uniform_int_distribution<std::size_t> pick_word(0, words.size() - 1);
  std::uniform_real_distribution<double> am(-20.0, -1.0);
  std::uniform_real_distribution<double> lm(-6.0, -0.1);
  auto add = [&](int s, int e) {
    lat.arcs.push_back({s, e, words[pick_word(rng)], 0, am(rng), lm(rng)});
  };
  // A spine through every node keeps all nodes reachable and co-reachable.
  for (int i = 0; i + 1 < n; ++i) add(i, i + 1);
  std::uniform_int_distribution<int> pick_node(0, n - 1);
  for (int k = 0; k < extra_arcs; ++k) {
    int a = pick_node(rng);
    int b = pick_node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    add(a, b);
  }
  return lat;
}

std::vector<std::string> Words(const Vocabulary& vocab, const std::vector<WordId>& ids) {
  std::vector<std::string> out;
  for (WordId w : ids) out.push_back(vocab.Word(w));
  return out;
}

}  // namespace rnnsearch::testing
