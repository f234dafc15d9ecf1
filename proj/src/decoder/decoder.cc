// src/decoder/decoder.cc

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

#include "rnnsearch/decoder/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/net/lookahead.hpp"

namespace rnnsearch {

SearchMode ParseSearchMode(const std::string& name) {
  if (name == "viterbi") return SearchMode::kViterbi;
  if (name == "fullsum") return SearchMode::kFullsum;
  throw ConfigError("unknown search mode '" + name + "' (expected viterbi or fullsum)");
}

const char* SearchModeName(SearchMode mode) {
  return mode == SearchMode::kFullsum ? "fullsum" : "viterbi";
}

void DecodeConfig::Validate() const {
  if (!(beam > 0.0)) throw ConfigError("beam must be positive");
  if (!(scale_am > 0.0) || !std::isfinite(scale_am)) throw ConfigError("scale_am must be positive");
  if (!(scale_lm > 0.0) || !std::isfinite(scale_lm)) throw ConfigError("scale_lm must be positive");
  if (recombination_n < 1) throw ConfigError("recombination limit must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(search_ms_per_hyp >= 0.0)) throw ConfigError("search cost must be nonnegative");
  cost.Validate();
}

double FullsumStep(std::span<const double> scores, SearchMode mode) {
  if (scores.empty()) throw ConfigError("FullsumStep needs at least one score");
  if (mode == SearchMode::kViterbi) return *std::min_element(scores.begin(), scores.end());
  return NegLogSum(scores);
}

namespace {

bool BetterEnd(const WordEndHypothesis& a, const WordEndHypothesis& b) {
  if (a.score != b.score) return a.score < b.score;
  if (a.word != b.word) return a.word < b.word;
  return a.history < b.history;
}

}  // namespace

std::vector<WordEndHypothesis> MergePronunciationVariants(std::vector<WordEndHypothesis> ends,
                                                          SearchMode mode) {
  std::map<std::tuple<HistoryId, int, WordId>, std::size_t> index;
  std::vector<std::vector<double>> scores;
  std::vector<WordEndHypothesis> out;
  for (auto& e : ends) {
    auto [it, fresh] = index.try_emplace({e.history, e.end_frame, e.word}, out.size());
    if (fresh) {
      scores.push_back({e.score});
      out.push_back(e);
      continue;
    }
    scores[it->second].push_back(e.score);
    if (BetterEnd(e, out[it->second])) out[it->second] = e;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].score = FullsumStep(scores[i], mode);
  return out;
}

std::vector<RecombinedWordEnd> Recombine(std::span<const WordEndHypothesis> ends,
                                         const HistoryStore& store, int n, SearchMode mode) {
  std::unordered_map<std::vector<WordId>, std::size_t, WordSeqHash> index;
  std::vector<RecombinedWordEnd> groups;
  for (const auto& e : ends) {
    auto key = RecombinationKey(store.Get(e.history), n);
    std::vector<WordId> k(key.begin(), key.end());
    auto [it, fresh] = index.try_emplace(std::move(k), groups.size());
    if (fresh) {
      groups.push_back(RecombinedWordEnd{e, e.score, {e}});
      continue;
    }
    auto& g = groups[it->second];
    g.members.push_back(e);
    if (BetterEnd(e, g.best)) g.best = e;
  }
  for (auto& g : groups) {
    if (mode == SearchMode::kFullsum) {
      std::vector<double> s;
      s.reserve(g.members.size());
      for (const auto& m : g.members) s.push_back(m.score);
      g.score = NegLogSum(s);
    } else {
      g.score = g.best.score;
    }
  }
  return groups;
}

namespace {

struct Hyp {
  HistoryId hist = kNoHistory;
  int node = 0;
  double score = 0.0;
  int entry_frame = 0;
  int bp = 0;
  double entry_score = 0.0;
};

struct RootEntry {
  HistoryId hist = kNoHistory;
  double score = 0.0;
  int bp = 0;
};

class Search {
 public:
  Search(const EmissionMatrix& emissions, const PrefixTree& tree, const LmScorer& scorer,
         const HmmTopology& topology, const DecodeConfig& cfg)
      : em_(emissions),
        tree_(tree),
        scorer_(scorer),
        topo_(topology),
        cfg_(cfg),
        store_(scorer),
        lookahead_(tree, scorer, cfg.lookahead_capacity) {}

  DecodeResult Run();

 private:
  using HypIndex = std::unordered_map<std::uint64_t, std::size_t>;

  double La(HistoryId h, int node);
  double Emit(int t, int node) const {
    return cfg_.scale_am * -em_(t, tree_.node(node).state);
  }
  void Relax(std::vector<Hyp>& hyps, HypIndex& index, const Hyp& cand) const;
  void Prune(std::vector<Hyp>& hyps) const;
  std::vector<RootEntry> WordEnds(const std::vector<Hyp>& active, int boundary, bool final);
  void ForwardDemanded(std::vector<HistoryId> demanded, const std::vector<Hyp>& active, int frame);
  std::string KeyString(HistoryId h) const;

  const EmissionMatrix& em_;
  const PrefixTree& tree_;
  const LmScorer& scorer_;
  const HmmTopology& topo_;
  const DecodeConfig& cfg_;
  HistoryStore store_;
  LookaheadCache lookahead_;
  std::unordered_map<HistoryId, std::shared_ptr<const LookaheadTable>> tables_;
  DecodeResult result_;
};

double Search::La(HistoryId h, int node) {
  if (!cfg_.lookahead) return 0.0;
  auto it = tables_.find(h);
  if (it == tables_.end()) it = tables_.emplace(h, lookahead_.Get(store_.Get(h).words)).first;
  return (*it->second)[static_cast<std::size_t>(node)];
}

void Search::Relax(std::vector<Hyp>& hyps, HypIndex& index, const Hyp& cand) const {
  const std::uint64_t key = (static_cast<std::uint64_t>(cand.hist) << 32) |
                            static_cast<std::uint32_t>(cand.node);
  auto [it, fresh] = index.try_emplace(key, hyps.size());
  if (fresh) {
    hyps.push_back(cand);
    return;
  }
  Hyp& cur = hyps[it->second];
  if (cfg_.mode == SearchMode::kFullsum) {
    const double sum = NegLogAdd(cur.score, cand.score);
    if (cand.score < cur.score) cur = cand;
    cur.score = sum;
  } else if (cand.score < cur.score) {
    cur = cand;
  }
}

void Search::Prune(std::vector<Hyp>& hyps) const {
  if (hyps.empty()) return;
  double best = kInf;
  for (const auto& h : hyps) best = std::min(best, h.score);
  if (std::isfinite(cfg_.beam)) {
    const double limit = best + cfg_.beam;
    std::erase_if(hyps, [&](const Hyp& h) { return h.score > limit; });
  }
  if (cfg_.max_hyps > 0 && hyps.size() > cfg_.max_hyps) {
    std::sort(hyps.begin(), hyps.end(), [](const Hyp& a, const Hyp& b) {
      if (a.score != b.score) return a.score < b.score;
      if (a.hist != b.hist) return a.hist < b.hist;
      return a.node < b.node;
    });
    hyps.resize(cfg_.max_hyps);
  }
}

std::string Search::KeyString(HistoryId h) const {
  auto key = RecombinationKey(store_.Get(h), cfg_.recombination_n);
  std::string out;
  for (WordId w : key) {
    if (!out.empty()) out += ' ';
    out += scorer_.vocab().Word(w);
  }
  return out;
}

void Search::ForwardDemanded(std::vector<HistoryId> demanded, const std::vector<Hyp>& active,
                             int frame) {
  std::erase_if(demanded, [&](HistoryId h) { return !store_.NeedsForward(h); });
  if (demanded.empty()) return;
  std::sort(demanded.begin(), demanded.end());
  demanded.erase(std::unique(demanded.begin(), demanded.end()), demanded.end());
  const std::unordered_set<HistoryId> demanded_set(demanded.begin(), demanded.end());

  // Speculative candidates: live histories not forwarded yet.
  double frame_best = kInf;
  for (const auto& h : active) frame_best = std::min(frame_best, h.score);
  std::unordered_map<HistoryId, LmRequest> spec;
  for (const auto& h : active) {
    if (demanded_set.count(h.hist) || !store_.NeedsForward(h.hist)) continue;
    const int dist = tree_.node(h.node).states_to_word_end;
    const double gap = h.score - frame_best;
    auto [it, fresh] = spec.try_emplace(h.hist, LmRequest{h.hist, RequestTrigger::kSpeculative,
                                                          dist, gap});
    if (!fresh) {
      it->second.distance = std::min(it->second.distance, dist);
      it->second.gap = std::min(it->second.gap, gap);
    }
  }

  for (std::size_t begin = 0; begin < demanded.size(); begin += cfg_.batch_size) {
    const std::size_t end = std::min(demanded.size(), begin + cfg_.batch_size);
    std::vector<LmRequest> pending;
    for (std::size_t i = begin; i < end; ++i) {
      pending.push_back(LmRequest{demanded[i], RequestTrigger::kDemanded, 0, 0.0});
    }
    for (const auto& [id, r] : spec) {
      if (store_.NeedsForward(id)) pending.push_back(r);
    }
    const auto batch = Schedule(pending, cfg_.batch_size);
    BatchRecord rec;
    rec.frame = frame;
    rec.demanded = end - begin;
    for (const auto& r : batch) rec.histories.push_back(r.history);
    store_.Forward(rec.histories);
    result_.stats.lm_simulated_ms += cfg_.cost.BatchMs(rec.histories.size());
    result_.stats.batches.push_back(std::move(rec));
  }
}

std::vector<RootEntry> Search::WordEnds(const std::vector<Hyp>& active, int boundary, bool final) {
  const double sa = cfg_.scale_am;
  const double sl = cfg_.scale_lm;

  struct Raw {
    std::size_t hyp;
    const TreeWordEnd* end;
    double base;
  };
  std::vector<Raw> raw;
  std::vector<HistoryId> demanded;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Hyp& h = active[i];
    const auto& node = tree_.node(h.node);
    const double undo_la = sl * La(h.hist, h.node);
    bool any = false;
    for (const auto& e : node.ends) {
      raw.push_back({i, &e, h.score + sa * topo_.forward_penalty - sa * e.log_prob + undo_la});
      any = true;
    }
    if (topo_.skip_allowed) {
      for (int c : node.children) {
        for (const auto& e : tree_.node(c).ends) {
          raw.push_back({i, &e, h.score + sa * topo_.skip_penalty - sa * e.log_prob + undo_la});
          any = true;
        }
      }
    }
    if (any) demanded.push_back(h.hist);
  }
  if (raw.empty()) return {};
  ForwardDemanded(std::move(demanded), active, boundary - 1);

  std::vector<WordEndHypothesis> cands;
  cands.reserve(raw.size());
  for (const auto& r : raw) {
    const Hyp& h = active[r.hyp];
    const double lm = scorer_.Score(store_.Get(h.hist), r.end->word);
    WordEndHypothesis e;
    e.word = r.end->word;
    e.variant = r.end->variant;
    e.start_frame = h.entry_frame;
    e.end_frame = boundary;
    e.score = r.base + sl * -lm;
    e.history = store_.Extend(h.hist, r.end->word);
    e.backpointer = h.bp;
    e.entry_score = h.entry_score;
    e.lm = lm;
    cands.push_back(e);
  }
  cands = MergePronunciationVariants(std::move(cands), cfg_.mode);

  double best = kInf;
  for (const auto& e : cands) best = std::min(best, e.score);
  if (std::isfinite(cfg_.beam)) {
    const double limit = best + cfg_.beam;
    std::erase_if(cands, [&](const WordEndHypothesis& e) { return e.score > limit; });
  }

  if (final) {
    std::vector<HistoryId> need;
    for (const auto& e : cands) need.push_back(e.history);
    ForwardDemanded(std::move(need), active, boundary - 1);
    for (auto& e : cands) {
      const double eos = scorer_.Score(store_.Get(e.history), scorer_.sentence_end());
      e.score += sl * -eos;
      e.lm += eos;
    }
  }
  result_.stats.word_ends += cands.size();

  const auto groups = Recombine(cands, store_, cfg_.recombination_n, cfg_.mode);
  result_.stats.keys_per_frame.push_back(groups.size());
  std::vector<RootEntry> roots;
  auto& lat = result_.lattice;
  for (const auto& g : groups) {
    const int node = static_cast<int>(lat.nodes.size());
    lat.nodes.push_back(LatticeNode{boundary, KeyString(g.best.history)});
    for (const auto& m : g.members) {
      LatticeArc arc;
      arc.start = m.backpointer;
      arc.end = node;
      arc.word = scorer_.vocab().Word(m.word);
      arc.variant = m.variant;
      arc.am = -(m.score - m.entry_score - sl * -m.lm) / sa;
      arc.lm = m.lm;
      lat.arcs.push_back(std::move(arc));
    }
    roots.push_back(RootEntry{g.best.history, g.score, node});
  }
  if (final) {
    // Pick the best final group with the same ordering as recombination.
    const RecombinedWordEnd* win = nullptr;
    for (const auto& g : groups) {
      if (!win || g.score < win->score ||
          (g.score == win->score && BetterEnd(g.best, win->best))) {
        win = &g;
      }
    }
    const auto& words = store_.Get(win->best.history).words;
    result_.word_ids.assign(words.begin() + 1, words.end());
    result_.score = win->score;
  }
  return roots;
}

DecodeResult Search::Run() {
  cfg_.Validate();
  topo_.Validate();
  if (tree_.MaxState() >= em_.states()) {
    throw DataError("lexicon uses state " + std::to_string(tree_.MaxState()) +
                    " but the emission matrix has " + std::to_string(em_.states()) + " states");
  }
  const int frames = em_.frames();
  const double sa = cfg_.scale_am;
  const double sl = cfg_.scale_lm;
  auto& stats = result_.stats;
  stats.frames = frames;
  result_.lattice.utterance_id = em_.utterance_id();

  const HistoryId h0 = store_.Initial();
  result_.lattice.nodes.push_back(LatticeNode{0, scorer_.vocab().Word(scorer_.sentence_begin())});
  std::vector<RootEntry> roots{{h0, 0.0, 0}};
  std::vector<Hyp> active;
  const auto& root = tree_.node(PrefixTree::kRoot);

  for (int t = 0; t < frames; ++t) {
    std::vector<Hyp> next;
    HypIndex index;
    for (const Hyp& h : active) {
      const auto& node = tree_.node(h.node);
      const double la_n = La(h.hist, h.node);
      Hyp c = h;
      c.score = h.score + sa * topo_.loop_penalty + Emit(t, h.node);
      Relax(next, index, c);
      for (int child : node.children) {
        c.node = child;
        c.score = h.score + sa * topo_.forward_penalty - sl * (La(h.hist, child) - la_n) +
                  Emit(t, child);
        Relax(next, index, c);
        if (!topo_.skip_allowed) continue;
        for (int grand : tree_.node(child).children) {
          c.node = grand;
          c.score = h.score + sa * topo_.skip_penalty - sl * (La(h.hist, grand) - la_n) +
                    Emit(t, grand);
          Relax(next, index, c);
        }
      }
    }
    for (const RootEntry& r : roots) {
      for (int child : root.children) {
        Hyp c;
        c.hist = r.hist;
        c.node = child;
        c.score = r.score - sl * La(r.hist, child) + Emit(t, child);
        c.entry_frame = t;
        c.bp = r.bp;
        c.entry_score = r.score;
        Relax(next, index, c);
      }
    }
    Prune(next);
    if (next.empty()) throw SearchCollapsed(t);
    active = std::move(next);
    stats.hyps_per_frame.push_back(active.size());
    stats.total_hyps += active.size();
    stats.search_simulated_ms += cfg_.search_ms_per_hyp * static_cast<double>(active.size());

    const bool final = t + 1 == frames;
    roots = WordEnds(active, t + 1, final);
    if (final && roots.empty()) throw SearchCollapsed(t);
  }

  for (WordId w : result_.word_ids) result_.words.push_back(scorer_.vocab().Word(w));
  result_.lattice.Trim();
  stats.histories = store_.size();
  stats.forwards = store_.forward_count();
  stats.forward_counts = store_.ForwardCounts();
  return std::move(result_);
}

}  // namespace

DecodeResult Decode(const EmissionMatrix& emissions, const PrefixTree& tree, const LmScorer& scorer,
                    const HmmTopology& topology, const DecodeConfig& cfg) {
  Search search(emissions, tree, scorer, topology, cfg);
  return search.Run();
}

}  // namespace rnnsearch
