// include/rnnsearch/lm/scorer.hpp

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

#include <memory>
#include <span>
#include <vector>

#include "rnnsearch/io/lexicon.hpp"
#include "rnnsearch/io/vocabulary.hpp"
#include "rnnsearch/lm/backoff_lm.hpp"
#include "rnnsearch/lm/recurrent_lm.hpp"

namespace rnnsearch {

struct LmHistory;

struct InterpolationConfig {
  double lambda_backoff = 0.5;
  double lambda_recurrent = 0.5;
  bool renormalize = false;

  /// Throws ConfigError for negative weights or both weights zero.
  void Validate() const;
};

/// Log-linear combination of a backoff and a recurrent log probability.
inline double InterpScore(const InterpolationConfig& cfg, double s_backoff, double s_recurrent) {
  return cfg.lambda_backoff * s_backoff + cfg.lambda_recurrent * s_recurrent;
}

/// Interpolated scores over a whole vocabulary, shifted to sum to one in the
/// probability domain when cfg.renormalize is set.
std::vector<double> InterpScores(const InterpolationConfig& cfg, std::span<const double> s_backoff,
                                 std::span<const double> s_recurrent);

/// Global vocabulary: sentence markers, <unk> if any model has it, lexicon words, then
/// any remaining LM words.
Vocabulary BuildVocabulary(const Lexicon* lexicon, const BackoffLm* backoff,
                           const RecurrentLm* recurrent);

/// Uniform scoring front-end over global word ids. With both models present the
/// score is the log-linear interpolation; with one model it is that model's ln p.
class LmScorer {
 public:
  /// Throws DataError when a vocabulary word is unknown to a model that has no <unk>.
  LmScorer(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const BackoffLm> backoff,
           std::shared_ptr<const RecurrentLm> recurrent, InterpolationConfig cfg = {});

  const Vocabulary& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const { return vocab_; }
  const InterpolationConfig& config() const { return cfg_; }
  const BackoffLm* backoff() const { return backoff_.get(); }
  const RecurrentLm* recurrent() const { return recurrent_.get(); }
  bool interpolated() const { return backoff_ && recurrent_; }
  WordId sentence_begin() const { return bos_; }
  WordId sentence_end() const { return eos_; }

  int BackoffId(WordId w) const { return to_backoff_[static_cast<std::size_t>(w)]; }
  int RecurrentId(WordId w) const { return to_recurrent_[static_cast<std::size_t>(w)]; }

  /// Backoff ln p with global ids; only the last order-1 context words matter.
  double BackoffScore(std::span<const WordId> context, WordId word) const;
  /// Requires a forwarded history.
  double RecurrentScore(const LmHistory& h, WordId word) const;
  /// Combined score; renormalized over the normalization set when configured.
  double Score(const LmHistory& h, WordId word) const;
  /// ln of sum over the normalization set of exp(unnormalized combined score).
  double LogNormalizer(const LmHistory& h) const;
  /// Global ids of the predicted vocabulary (the backoff model's words if present,
  /// otherwise the recurrent model's).
  std::span<const WordId> normalization_set() const { return norm_set_; }

 private:
  double RawScore(const LmHistory& h, WordId word) const;

  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const BackoffLm> backoff_;
  std::shared_ptr<const RecurrentLm> recurrent_;
  InterpolationConfig cfg_;
  WordId bos_ = 0;
  WordId eos_ = 0;
  std::vector<int> to_backoff_;
  std::vector<int> to_recurrent_;
  std::vector<WordId> norm_set_;
};

}  // namespace rnnsearch
