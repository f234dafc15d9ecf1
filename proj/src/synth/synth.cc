// src/synth/synth.cc

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

#include "rnnsearch/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <limits>
#include <memory>
#include <set>
#include <unordered_map>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"
#include "rnnsearch/lm/backoff_lm.hpp"
#include "rnnsearch/lm/history.hpp"
#include "rnnsearch/lm/recurrent_lm.hpp"

namespace rnnsearch::synth {

namespace {

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

Lexicon RandomLexicon(Rng& rng, const LexiconSpec& spec) {
  if (spec.words < 1 || spec.states < 1 || spec.min_length < 1 ||
      spec.max_length < spec.min_length) {
    throw ConfigError("invalid lexicon spec");
  }
  Lexicon lex;
  int next_state = 0;
  std::set<std::vector<int>> used;
  auto draw = [&](int len) {
    std::vector<int> states(static_cast<std::size_t>(len));
    for (int& s : states) {
      if (spec.disjoint) {
        if (next_state >= spec.states) throw ConfigError("not enough states for a disjoint lexicon");
        s = next_state++;
      } else {
        s = UniformInt(rng, 0, spec.states - 1);
      }
    }
    return states;
  };
  for (int w = 0; w < spec.words; ++w) {
    LexiconWord word;
    word.word = "w" + std::to_string(w);
    const int variants = Uniform(rng, 0.0, 1.0) < spec.second_variant ? 2 : 1;
    const double p = variants == 2 ? Uniform(rng, 0.2, 0.8) : 1.0;
    for (int v = 0; v < variants; ++v) {
      std::vector<int> states;
      // Redraw on collisions so that every pronunciation is distinct.
      for (int tries = 0; tries < 100; ++tries) {
        states = draw(UniformInt(rng, spec.min_length, spec.max_length));
        if (used.insert(states).second) break;
      }
      word.variants.push_back(Pronunciation{v == 0 ? p : 1.0 - p, std::move(states)});
    }
    lex.words.push_back(std::move(word));
  }
  return lex;
}

std::vector<PlantedWord> RandomPlan(Rng& rng, const Lexicon& lexicon, int count, int extra) {
  std::vector<PlantedWord> plan;
  for (int i = 0; i < count; ++i) {
    PlantedWord p;
    p.word = UniformInt(rng, 0, static_cast<int>(lexicon.words.size()) - 1);
    const auto& w = lexicon.words[static_cast<std::size_t>(p.word)];
    p.variant = UniformInt(rng, 0, static_cast<int>(w.variants.size()) - 1);
    p.frames = static_cast<int>(w.variants[static_cast<std::size_t>(p.variant)].states.size()) +
               UniformInt(rng, 0, extra);
    plan.push_back(p);
  }
  return plan;
}

EmissionSpec CalibratedEmissions(double confusion, int states) {
  if (!(confusion > 0.0 && confusion < 1.0) || states < 1) {
    throw ConfigError("calibrated emissions need 0 < confusion < 1 and states >= 1");
  }
  const double off = confusion / states;
  EmissionSpec spec;
  spec.peak = std::log(1.0 - confusion + off);
  spec.off_peak = std::log(off);
  spec.jitter = 0.0;
  spec.confusion = confusion;
  return spec;
}

EmissionMatrix PlantEmissions(Rng& rng, const Lexicon& lexicon, const std::vector<PlantedWord>& words,
                              int states, const EmissionSpec& spec, std::string utterance_id) {
  std::vector<int> path;
  for (const auto& pw : words) {
    const auto& pron = lexicon.words.at(static_cast<std::size_t>(pw.word))
                           .variants.at(static_cast<std::size_t>(pw.variant))
                           .states;
    const int len = static_cast<int>(pron.size());
    if (pw.frames < len) throw ConfigError("planted word shorter than its pronunciation");
    std::vector<int> per_state(pron.size(), 1);
    for (int i = len; i < pw.frames; ++i) ++per_state[static_cast<std::size_t>(UniformInt(rng, 0, len - 1))];
    for (std::size_t s = 0; s < pron.size(); ++s) path.insert(path.end(), static_cast<std::size_t>(per_state[s]), pron[s]);
  }
  if (path.empty()) throw ConfigError("nothing to plant");
  const int frames = static_cast<int>(path.size());
  std::vector<double> scores(static_cast<std::size_t>(frames) * static_cast<std::size_t>(states));
  for (int t = 0; t < frames; ++t) {
    double* row = scores.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(states);
    for (int s = 0; s < states; ++s) row[s] = spec.off_peak - Uniform(rng, 0.0, spec.jitter);
    int target = path[static_cast<std::size_t>(t)];
    if (spec.confusion > 0.0 && Uniform(rng, 0.0, 1.0) < spec.confusion) {
      target = UniformInt(rng, 0, states - 1);
    }
    row[target] = spec.peak - Uniform(rng, 0.0, spec.jitter);
  }
  return EmissionMatrix(std::move(utterance_id), frames, states, std::move(scores),
                        spec.frame_shift_s);
}

BackoffLmData RandomBackoffLm(Rng& rng, const std::vector<std::string>& words, int order,
                              double coverage) {
  if (order < 1) throw ConfigError("order must be at least 1");
  BackoffLmData lm;
  lm.order = order;
  lm.vocab.Add(kSentenceBegin);
  lm.vocab.Add(kSentenceEnd);
  for (const auto& w : words) lm.vocab.Add(w);
  lm.tables.resize(static_cast<std::size_t>(order));

  const WordId bos = lm.vocab.Id(kSentenceBegin);
  const WordId eos = lm.vocab.Id(kSentenceEnd);
  std::vector<WordId> predicted;
  for (std::size_t i = 0; i < lm.vocab.size(); ++i) {
    if (static_cast<WordId>(i) != bos) predicted.push_back(static_cast<WordId>(i));
  }

  std::vector<double> weights;
  for (std::size_t i = 0; i < predicted.size(); ++i) weights.push_back(Uniform(rng, 0.2, 1.0));
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  lm.tables[0].emplace(std::vector<WordId>{bos}, NgramEntry{-99.0, 0.0});
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    lm.tables[0].emplace(std::vector<WordId>{predicted[i]},
                         NgramEntry{std::log10(weights[i] / total), 0.0});
  }

  for (int n = 2; n <= order; ++n) {
    std::vector<std::vector<WordId>> contexts;
    for (const auto& [key, entry] : lm.tables[static_cast<std::size_t>(n - 2)]) {
      if (key.back() != eos) contexts.push_back(key);
    }
    std::sort(contexts.begin(), contexts.end());
    for (const auto& ctx : contexts) {
      if (Uniform(rng, 0.0, 1.0) >= coverage) continue;
      std::vector<WordId> pool = predicted;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<std::size_t>(UniformInt(rng, 1, static_cast<int>(predicted.size()) - 1)));
      const double mass = Uniform(rng, 0.3, 0.9);
      std::vector<double> share;
      for (std::size_t i = 0; i < pool.size(); ++i) share.push_back(Uniform(rng, 0.2, 1.0));
      const double share_total = std::accumulate(share.begin(), share.end(), 0.0);

      const std::span<const WordId> lower_ctx(ctx.data() + 1, ctx.size() - 1);
      double lower = 0.0;
      for (WordId w : pool) lower += std::pow(10.0, lm.Log10Prob(lower_ctx, w));
      for (std::size_t i = 0; i < pool.size(); ++i) {
        std::vector<WordId> key = ctx;
        key.push_back(pool[i]);
        lm.tables[static_cast<std::size_t>(n - 1)].emplace(
            std::move(key), NgramEntry{std::log10(mass * share[i] / share_total), 0.0});
      }
      lm.tables[static_cast<std::size_t>(n - 2)][ctx].log10_backoff =
          std::log10((1.0 - mass) / (1.0 - lower));
    }
  }
  return lm;
}

RecurrentLmData RandomRecurrentLm(Rng& rng, const std::vector<std::string>& words, CellType cell,
                                  int layers, int embed_dim, int hidden_dim, double scale) {
  if (layers < 1 || embed_dim < 1 || hidden_dim < 1) throw ConfigError("invalid recurrent LM shape");
  RecurrentLmData lm;
  lm.cell = cell;
  lm.embed_dim = static_cast<std::size_t>(embed_dim);
  lm.hidden_dim = static_cast<std::size_t>(hidden_dim);
  lm.vocab = {std::string(kSentenceBegin), std::string(kSentenceEnd)};
  lm.vocab.insert(lm.vocab.end(), words.begin(), words.end());
  const std::size_t v = lm.vocab.size();
  const std::size_t h = lm.hidden_dim;
  const std::size_t gates = cell == CellType::kLstm ? 4 * h : h;
  auto fill = [&](std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (double& x : m.data) x = Uniform(rng, -scale, scale);
    return m;
  };
  lm.embedding = fill(v, lm.embed_dim);
  for (int l = 0; l < layers; ++l) {
    RecurrentLayer layer;
    layer.input = fill(gates, l == 0 ? lm.embed_dim : h);
    layer.recurrent = fill(gates, h);
    layer.bias = fill(gates, 1);
    lm.layers.push_back(std::move(layer));
  }
  lm.output_weights = fill(v, h);
  lm.output_bias = fill(v, 1);
  lm.Validate();
  return lm;
}

std::vector<std::string> LexiconWords(const Lexicon& lexicon) {
  std::vector<std::string> out;
  for (const auto& w : lexicon.words) out.push_back(w.word);
  return out;
}

std::vector<std::string> SampleSentence(Rng& rng, const LmScorer& scorer, const Lexicon& lexicon,
                                        int max_words) {
  std::vector<WordId> choices;
  for (const auto& w : lexicon.words) choices.push_back(scorer.vocab().Id(w.word));
  choices.push_back(scorer.sentence_end());
  HistoryStore store(scorer);
  std::vector<double> weights(choices.size());
  for (;;) {
    HistoryId h = store.Initial();
    std::vector<std::string> words;
    while (static_cast<int>(words.size()) < max_words) {
      store.EnsureForwarded(h);
      // Exclude </s> for the first word so the sentence is never empty.
      const std::size_t usable = words.empty() ? choices.size() - 1 : choices.size();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < usable; ++i) {
        weights[i] = scorer.Score(store.Get(h), choices[i]);
        hi = std::max(hi, weights[i]);
      }
      for (std::size_t i = 0; i < usable; ++i) weights[i] = std::exp(weights[i] - hi);
      std::discrete_distribution<std::size_t> pick(weights.begin(),
                                                   weights.begin() + static_cast<std::ptrdiff_t>(usable));
      const std::size_t k = pick(rng);
      if (choices[k] == scorer.sentence_end()) break;
      words.push_back(scorer.vocab().Word(choices[k]));
      h = store.Extend(h, choices[k]);
    }
    if (!words.empty()) return words;
  }
}

SynthCorpus MakeSynthCorpus(Rng& rng, const CorpusSpec& spec) {
  SynthCorpus c;
  c.lexicon = RandomLexicon(rng, spec.lexicon);
  const auto words = LexiconWords(c.lexicon);
  c.arpa = RandomBackoffLm(rng, words, spec.arpa_order);
  c.rnn = RandomRecurrentLm(rng, words, spec.cell, 1, spec.embed_dim, spec.hidden_dim,
                            spec.rnn_scale);

  auto backoff = std::make_shared<const BackoffLm>(c.arpa);
  auto rnn = std::make_shared<const RecurrentLm>(c.rnn);
  auto vocab = std::make_shared<const Vocabulary>(BuildVocabulary(&c.lexicon, backoff.get(), rnn.get()));
  InterpolationConfig interp{spec.lambda_backoff, spec.lambda_recurrent, false};
  const LmScorer scorer(vocab, backoff, rnn, interp);

  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < c.lexicon.words.size(); ++i) index[c.lexicon.words[i].word] = static_cast<int>(i);
  for (int u = 0; u < spec.utterances; ++u) {
    auto sentence = SampleSentence(rng, scorer, c.lexicon, spec.max_sentence_words);
    std::vector<PlantedWord> plan;
    for (const auto& w : sentence) {
      PlantedWord p;
      p.word = index.at(w);
      const auto& entry = c.lexicon.words[static_cast<std::size_t>(p.word)];
      std::vector<double> probs;
      for (const auto& v : entry.variants) probs.push_back(v.prob);
      p.variant = static_cast<int>(std::discrete_distribution<int>(probs.begin(), probs.end())(rng));
      p.frames = static_cast<int>(entry.variants[static_cast<std::size_t>(p.variant)].states.size()) +
                 UniformInt(rng, 0, spec.extra_frames);
      plan.push_back(p);
    }
    char id[32];
    std::snprintf(id, sizeof id, "utt%03d", u);
    c.emissions.push_back(PlantEmissions(rng, c.lexicon, plan, spec.lexicon.states, spec.emissions, id));
    c.references.push_back(std::move(sentence));
  }
  return c;
}

CorpusManifest SynthManifest(const SynthCorpus& corpus, const std::string& dir) {
  CorpusManifest m;
  for (std::size_t i = 0; i < corpus.emissions.size(); ++i) {
    const auto& em = corpus.emissions[i];
    ManifestEntry e;
    e.utterance_id = em.utterance_id();
    e.emission_path = (dir.empty() ? "" : dir + "/") + em.utterance_id() + ".emit";
    e.duration_s = std::round(em.frames() * em.frame_shift_s() * 1e6) / 1e6;
    e.reference = corpus.references[i];
    m.entries.push_back(std::move(e));
  }
  return m;
}

void WriteSynthCorpus(const SynthCorpus& corpus, const std::string& dir) {
  WriteFile(dir + "/lexicon.tsv", WriteLexicon(corpus.lexicon));
  WriteFile(dir + "/lm.arpa", WriteArpa(corpus.arpa));
  WriteFile(dir + "/rnnlm.txt", WriteRnnWeights(corpus.rnn));
  for (const auto& em : corpus.emissions) {
    WriteFile(dir + "/" + em.utterance_id() + ".emit", WriteEmissions(em));
  }
  WriteFile(dir + "/manifest.tsv", WriteManifest(SynthManifest(corpus, "")));
}

}  // namespace rnnsearch::synth
