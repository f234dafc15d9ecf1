// include/rnnsearch/synth/synth.hpp

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
#include <random>
#include <string>
#include <vector>

#include "rnnsearch/io/arpa.hpp"
#include "rnnsearch/io/emissions.hpp"
#include "rnnsearch/io/lexicon.hpp"
#include "rnnsearch/io/manifest.hpp"
#include "rnnsearch/io/rnn_weights.hpp"
#include "rnnsearch/lm/scorer.hpp"

namespace rnnsearch::synth {

using Rng = std::mt19937_64;

struct LexiconSpec {
  int words = 5;
  int states = 40;
  int min_length = 3;
  int max_length = 6;
  /// Chance that a word gets a second pronunciation variant.
  double second_variant = 0.0;
  /// When set, no two pronunciations share a state, so the tree is a star.
  bool disjoint = false;
};

/// Words are named w0, w1, ... in order.
Lexicon RandomLexicon(Rng& rng, const LexiconSpec& spec);

struct PlantedWord {
  int word = 0;     // index into lexicon.words
  int variant = 0;
  int frames = 0;   // at least the pronunciation length
};

struct EmissionSpec {
  double peak = -0.05;
  double off_peak = -4.0;
  /// Uniform jitter in [0, jitter) subtracted from every value.
  double jitter = 0.01;
  /// Chance per frame that the planted state swaps its score with another state.
  double confusion = 0.0;
  double frame_shift_s = 0.01;
};

/// Emission scores that are the exact log-likelihoods of the confusion process over
/// `states` states: ln(1 - c + c/states) on the observed state, ln(c/states) elsewhere.
EmissionSpec CalibratedEmissions(double confusion, int states);

/// Emissions peaked on the planted state path. Each word's frames are spread over its
/// states left to right, every state getting at least one frame.
EmissionMatrix PlantEmissions(Rng& rng, const Lexicon& lexicon, const std::vector<PlantedWord>& words,
                              int states, const EmissionSpec& spec, std::string utterance_id = {});

/// Random planted sequence of `count` words, each lasting its length plus 0..extra frames.
std::vector<PlantedWord> RandomPlan(Rng& rng, const Lexicon& lexicon, int count, int extra);

/// Random backoff model over <s>, </s> and `words`, normalized by construction: each
/// context with explicit n-grams gets a backoff weight that makes it sum to one.
/// `coverage` is the chance a context gets explicit n-grams.
BackoffLmData RandomBackoffLm(Rng& rng, const std::vector<std::string>& words, int order,
                              double coverage = 0.7);

/// Random recurrent model over <s>, </s> and `words` with weights uniform in
/// [-scale, scale].
RecurrentLmData RandomRecurrentLm(Rng& rng, const std::vector<std::string>& words, CellType cell,
                                  int layers, int embed_dim, int hidden_dim, double scale = 1.0);

std::vector<std::string> LexiconWords(const Lexicon& lexicon);

/// Samples lexicon words from the scorer, renormalized over the lexicon words and
/// </s>, until </s> or `max_words`. Never returns an empty sentence.
std::vector<std::string> SampleSentence(Rng& rng, const LmScorer& scorer, const Lexicon& lexicon,
                                        int max_words);

struct CorpusSpec {
  int utterances = 20;
  LexiconSpec lexicon{8, 40, 3, 5, 0.2, false};
  int arpa_order = 2;
  CellType cell = CellType::kElman;
  int embed_dim = 6;
  int hidden_dim = 6;
  double rnn_scale = 2.0;
  double lambda_backoff = 0.5;
  double lambda_recurrent = 0.5;
  int max_sentence_words = 8;
  int extra_frames = 3;
  /// Confusable enough that the LM changes the recognized words.
  EmissionSpec emissions = CalibratedEmissions(0.6, 40);
};

struct SynthCorpus {
  Lexicon lexicon;
  BackoffLmData arpa;
  RecurrentLmData rnn;
  std::vector<EmissionMatrix> emissions;
  std::vector<std::vector<std::string>> references;
};

/// Random models plus utterances whose references are sampled from the
/// interpolated LM and whose emissions are planted on those references.
SynthCorpus MakeSynthCorpus(Rng& rng, const CorpusSpec& spec);

/// Manifest entries with durations frames * frame_shift and emission paths
/// `<dir>/<id>.emit`.
CorpusManifest SynthManifest(const SynthCorpus& corpus, const std::string& dir);

/// Writes lexicon.tsv, lm.arpa, rnnlm.txt, manifest.tsv and one .emit per utterance.
void WriteSynthCorpus(const SynthCorpus& corpus, const std::string& dir);

}  // namespace rnnsearch::synth
