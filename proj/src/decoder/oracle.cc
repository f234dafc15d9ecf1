// src/decoder/oracle.cc

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

#include "rnnsearch/decoder/oracle.hpp"

#include <cmath>

#include "rnnsearch/errors.hpp"

namespace rnnsearch {

std::pair<double, double> AlignWords(const EmissionMatrix& emissions,
                                     const std::vector<const std::vector<int>*>& prons,
                                     const HmmTopology& topology, double scale_am) {
  std::vector<int> states;
  std::vector<int> word_of;
  std::vector<char> word_first;
  for (std::size_t w = 0; w < prons.size(); ++w) {
    for (std::size_t i = 0; i < prons[w]->size(); ++i) {
      states.push_back((*prons[w])[i]);
      word_of.push_back(static_cast<int>(w));
      word_first.push_back(i == 0);
    }
  }
  const int m = static_cast<int>(states.size());
  const int frames = emissions.frames();
  const int last_word = static_cast<int>(prons.size()) - 1;
  auto emit = [&](int t, int j) { return scale_am * -emissions(t, states[static_cast<std::size_t>(j)]); };
  auto same_word = [&](int a, int b) {
    return b < m && word_of[static_cast<std::size_t>(a)] == word_of[static_cast<std::size_t>(b)];
  };

  // Transition cost from j to j + delta, or infinity when not allowed.
  auto step = [&](int j, int delta) -> double {
    const int k = j + delta;
    if (k >= m) return kInf;
    switch (delta) {
      case 0:
        return scale_am * topology.loop_penalty;
      case 1:
        return scale_am * topology.forward_penalty;
      default:
        if (!topology.skip_allowed) return kInf;
        if (same_word(j, k)) return scale_am * topology.skip_penalty;
        if (same_word(j, j + 1) && word_first[static_cast<std::size_t>(k)]) {
          return scale_am * topology.skip_penalty;
        }
        return kInf;
    }
  };

  std::vector<double> vit(static_cast<std::size_t>(m), kInf);
  std::vector<double> fwd(static_cast<std::size_t>(m), kInf);
  vit[0] = emit(0, 0);
  fwd[0] = vit[0];
  for (int t = 1; t < frames; ++t) {
    std::vector<double> nv(static_cast<std::size_t>(m), kInf);
    std::vector<double> nf(static_cast<std::size_t>(m), kInf);
    for (int j = 0; j < m; ++j) {
      if (vit[static_cast<std::size_t>(j)] == kInf) continue;
      for (int d = 0; d <= 2; ++d) {
        const double c = step(j, d);
        if (c == kInf) continue;
        const auto k = static_cast<std::size_t>(j + d);
        nv[k] = std::min(nv[k], vit[static_cast<std::size_t>(j)] + c);
        nf[k] = NegLogAdd(nf[k], fwd[static_cast<std::size_t>(j)] + c);
      }
    }
    for (int j = 0; j < m; ++j) {
      if (nv[static_cast<std::size_t>(j)] == kInf) continue;
      const double e = emit(t, j);
      nv[static_cast<std::size_t>(j)] += e;
      nf[static_cast<std::size_t>(j)] += e;
    }
    vit.swap(nv);
    fwd.swap(nf);
  }

  // Leave the last word: forward out of its last state or skip out of the one before.
  double v = kInf;
  double f = kInf;
  const double exit_fwd = scale_am * topology.forward_penalty;
  v = std::min(v, vit[static_cast<std::size_t>(m - 1)] + exit_fwd);
  f = NegLogAdd(f, fwd[static_cast<std::size_t>(m - 1)] + exit_fwd);
  if (topology.skip_allowed && m >= 2 && word_of[static_cast<std::size_t>(m - 2)] == last_word) {
    const double exit_skip = scale_am * topology.skip_penalty;
    v = std::min(v, vit[static_cast<std::size_t>(m - 2)] + exit_skip);
    f = NegLogAdd(f, fwd[static_cast<std::size_t>(m - 2)] + exit_skip);
  }
  return {v, f};
}

namespace {

int MinFrames(const std::vector<int>& states, bool skip) {
  const int len = static_cast<int>(states.size());
  return skip ? (len + 1) / 2 : len;
}

}  // namespace

OracleResult BruteForceOracle(const EmissionMatrix& emissions, const Lexicon& lexicon,
                              const LmScorer& scorer, const HmmTopology& topology,
                              const DecodeConfig& cfg, int max_words) {
  cfg.Validate();
  topology.Validate();
  const std::size_t nv = lexicon.words.size();
  if (nv == 0) throw ConfigError("oracle needs a nonempty lexicon");
  if (max_words < 1) throw ConfigError("oracle needs max_words >= 1");
  if (static_cast<double>(max_words) * std::log10(static_cast<double>(nv)) > 6.0 + 1e-12) {
    throw ConfigError("oracle budget exceeded: |V|^max_words > 10^6");
  }
  if (lexicon.MaxState() >= emissions.states()) {
    throw DataError("lexicon uses states beyond the emission matrix");
  }

  std::vector<WordId> ids;
  std::vector<int> min_frames;
  for (const auto& w : lexicon.words) {
    ids.push_back(scorer.vocab().Id(w.word));
    int lo = emissions.frames() + 1;
    for (const auto& p : w.variants) lo = std::min(lo, MinFrames(p.states, topology.skip_allowed));
    min_frames.push_back(lo);
  }

  HistoryStore store(scorer);
  const HistoryId h0 = store.Initial();
  const double sa = cfg.scale_am;
  const double sl = cfg.scale_lm;
  OracleResult result;

  for (int len = 1; len <= max_words; ++len) {
    std::vector<std::size_t> seq(static_cast<std::size_t>(len), 0);
    while (true) {
      int need = 0;
      for (std::size_t i : seq) need += min_frames[i];
      if (need <= emissions.frames()) {
        double lm = 0.0;
        HistoryId h = h0;
        for (std::size_t i : seq) {
          store.EnsureForwarded(h);
          lm += scorer.Score(store.Get(h), ids[i]);
          h = store.Extend(h, ids[i]);
        }
        store.EnsureForwarded(h);
        lm += scorer.Score(store.Get(h), scorer.sentence_end());

        double best_v = kInf;
        double sum_f = kInf;
        std::vector<std::size_t> var(static_cast<std::size_t>(len), 0);
        while (true) {
          std::vector<const std::vector<int>*> prons;
          double prior = 0.0;
          for (int i = 0; i < len; ++i) {
            const auto& p = lexicon.words[seq[static_cast<std::size_t>(i)]]
                                .variants[var[static_cast<std::size_t>(i)]];
            prons.push_back(&p.states);
            prior += std::log(p.prob);
          }
          auto [v, f] = AlignWords(emissions, prons, topology, sa);
          best_v = std::min(best_v, v - sa * prior);
          sum_f = NegLogAdd(sum_f, f - sa * prior);
          int k = len - 1;
          while (k >= 0) {
            auto& slot = var[static_cast<std::size_t>(k)];
            if (++slot < lexicon.words[seq[static_cast<std::size_t>(k)]].variants.size()) break;
            slot = 0;
            --k;
          }
          if (k < 0) break;
        }
        if (best_v < kInf) {
          SequenceScore s;
          for (std::size_t i : seq) s.words.push_back(ids[i]);
          s.viterbi = best_v + sl * -lm;
          s.fullsum = sum_f + sl * -lm;
          const double key = cfg.mode == SearchMode::kFullsum ? s.fullsum : s.viterbi;
          if (key < result.score) {
            result.score = key;
            result.words = s.words;
          }
          result.sequences.push_back(std::move(s));
        }
      }
      int k = len - 1;
      while (k >= 0) {
        if (++seq[static_cast<std::size_t>(k)] < nv) break;
        seq[static_cast<std::size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
    }
  }
  return result;
}

}  // namespace rnnsearch
