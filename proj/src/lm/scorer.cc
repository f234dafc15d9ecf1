// src/lm/scorer.cc

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

#include "rnnsearch/lm/scorer.hpp"

#include <cmath>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/lm/history.hpp"
#include "rnnsearch/log_math.hpp"

namespace rnnsearch {

void InterpolationConfig::Validate() const {
  if (!(lambda_backoff >= 0.0) || !(lambda_recurrent >= 0.0)) {
    throw ConfigError("interpolation weights must be nonnegative");
  }
  if (lambda_backoff == 0.0 && lambda_recurrent == 0.0) {
    throw ConfigError("interpolation weights must not both be zero");
  }
}

std::vector<double> InterpScores(const InterpolationConfig& cfg, std::span<const double> s_backoff,
                                 std::span<const double> s_recurrent) {
  if (s_backoff.size() != s_recurrent.size()) throw ConfigError("score vectors differ in length");
  std::vector<double> out(s_backoff.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = InterpScore(cfg, s_backoff[i], s_recurrent[i]);
  }
  if (cfg.renormalize) {
    double z = LogSumExp(out);
    for (double& s : out) s -= z;
  }
  return out;
}

Vocabulary BuildVocabulary(const Lexicon* lexicon, const BackoffLm* backoff,
                           const RecurrentLm* recurrent) {
  Vocabulary v;
  v.Add(kSentenceBegin);
  v.Add(kSentenceEnd);
  if ((backoff && backoff->unknown()) || (recurrent && recurrent->Find(kUnknownWord))) {
    v.Add(kUnknownWord);
  }
  if (lexicon) {
    for (const auto& w : lexicon->words) v.Add(w.word);
  }
  if (backoff) {
    for (const auto& w : backoff->vocab().words()) v.Add(w);
  }
  if (recurrent) {
    for (const auto& w : recurrent->data().vocab) v.Add(w);
  }
  return v;
}

LmScorer::LmScorer(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const BackoffLm> backoff,
                   std::shared_ptr<const RecurrentLm> recurrent, InterpolationConfig cfg)
    : vocab_(std::move(vocab)),
      backoff_(std::move(backoff)),
      recurrent_(std::move(recurrent)),
      cfg_(cfg) {
  if (!backoff_ && !recurrent_) throw ConfigError("scorer needs at least one language model");
  if (interpolated()) cfg_.Validate();
  bos_ = vocab_->Id(kSentenceBegin);
  eos_ = vocab_->Id(kSentenceEnd);
  const std::size_t n = vocab_->size();
  to_backoff_.assign(n, -1);
  to_recurrent_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& w = vocab_->Word(static_cast<WordId>(i));
    if (backoff_) {
      auto id = backoff_->Map(w);
      if (!id) throw DataError("word '" + w + "' is missing from the backoff LM, which has no <unk>");
      to_backoff_[i] = *id;
    }
    if (recurrent_) {
      auto id = recurrent_->Map(w);
      if (!id) throw DataError("word '" + w + "' is missing from the recurrent LM, which has no <unk>");
      to_recurrent_[i] = *id;
    }
  }
  if (backoff_) {
    for (const auto& w : backoff_->vocab().words()) norm_set_.push_back(vocab_->Id(w));
  } else {
    for (const auto& w : recurrent_->data().vocab) norm_set_.push_back(vocab_->Id(w));
  }
}

double LmScorer::BackoffScore(std::span<const WordId> context, WordId word) const {
  const std::size_t keep =
      std::min<std::size_t>(context.size(), static_cast<std::size_t>(backoff_->order() - 1));
  int mapped[16];
  std::vector<int> heap;
  int* ctx = mapped;
  if (keep > 16) {
    heap.resize(keep);
    ctx = heap.data();
  }
  for (std::size_t i = 0; i < keep; ++i) ctx[i] = BackoffId(context[context.size() - keep + i]);
  return backoff_->LogProb(std::span<const WordId>(ctx, keep), BackoffId(word));
}

double LmScorer::RecurrentScore(const LmHistory& h, WordId word) const {
  if (!h.forwarded) throw DataError("recurrent score requested for an unforwarded history");
  return h.log_dist[static_cast<std::size_t>(RecurrentId(word))];
}

double LmScorer::RawScore(const LmHistory& h, WordId word) const {
  if (!recurrent_) return BackoffScore(h.words, word);
  if (!backoff_) return RecurrentScore(h, word);
  return InterpScore(cfg_, BackoffScore(h.words, word), RecurrentScore(h, word));
}

double LmScorer::Score(const LmHistory& h, WordId word) const {
  double s = RawScore(h, word);
  if (cfg_.renormalize && interpolated()) s -= LogNormalizer(h);
  return s;
}

double LmScorer::LogNormalizer(const LmHistory& h) const {
  std::vector<double> scores;
  scores.reserve(norm_set_.size());
  for (WordId w : norm_set_) scores.push_back(RawScore(h, w));
  return LogSumExp(scores);
}

}  // namespace rnnsearch
