// src/lattice/lattice_ops.cc

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

#include "rnnsearch/lattice/lattice_ops.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <unordered_map>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/lm/history.hpp"

namespace rnnsearch {

namespace {

double ArcScore(const LatticeArc& a, double scale_am, double scale_lm) {
  return scale_am * a.am + scale_lm * a.lm;
}

std::vector<char> FinalMask(const Lattice& lat) {
  std::vector<char> mask(lat.nodes.size(), 0);
  for (int f : lat.FinalNodes()) mask[f] = 1;
  return mask;
}

LatticePath Backtrack(const Lattice& lat, const std::vector<int>& back_arc, int node, double score) {
  LatticePath path;
  path.score = score;
  while (node != lat.initial()) {
    const int a = back_arc[node];
    path.arcs.push_back(a);
    node = lat.arcs[a].start;
  }
  std::reverse(path.arcs.begin(), path.arcs.end());
  for (int a : path.arcs) path.words.push_back(lat.arcs[a].word);
  return path;
}

}  // namespace

LatticePath LatticeBestPath(const Lattice& lattice, double scale_am, double scale_lm) {
  if (lattice.nodes.empty()) return {};
  const auto out = lattice.OutgoingArcs();
  std::vector<double> best(lattice.nodes.size(), -kInf);
  std::vector<int> back(lattice.nodes.size(), -1);
  best[lattice.initial()] = 0.0;
  for (int u : lattice.TopologicalOrder()) {
    if (best[u] == -kInf) continue;
    for (int a : out[u]) {
      const auto& arc = lattice.arcs[a];
      const double s = best[u] + ArcScore(arc, scale_am, scale_lm);
      if (s > best[arc.end]) {
        best[arc.end] = s;
        back[arc.end] = a;
      }
    }
  }
  int end = -1;
  for (int f : lattice.FinalNodes()) {
    if (best[f] > -kInf && (end < 0 || best[f] > best[end])) end = f;
  }
  if (end < 0) return {};
  return Backtrack(lattice, back, end, best[end]);
}

std::vector<double> ForwardBackward(const Lattice& lattice, double scale_am, double scale_lm,
                                    double posterior_scale) {
  const std::size_t n = lattice.nodes.size();
  const auto order = lattice.TopologicalOrder();
  const auto out = lattice.OutgoingArcs();
  const auto in = lattice.IncomingArcs();
  std::vector<double> w(lattice.arcs.size());
  for (std::size_t a = 0; a < w.size(); ++a) {
    w[a] = posterior_scale * ArcScore(lattice.arcs[a], scale_am, scale_lm);
  }

  std::vector<double> alpha(n, -kInf);
  std::vector<double> beta(n, -kInf);
  alpha[lattice.initial()] = 0.0;
  std::vector<double> terms;
  for (int u : order) {
    if (u == lattice.initial()) continue;
    terms.clear();
    for (int a : in[u]) terms.push_back(alpha[lattice.arcs[a].start] + w[a]);
    alpha[u] = LogSumExp(terms);
  }
  const auto final_mask = FinalMask(lattice);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    if (final_mask[u]) {
      beta[u] = 0.0;
      continue;
    }
    terms.clear();
    for (int a : out[u]) terms.push_back(beta[lattice.arcs[a].end] + w[a]);
    beta[u] = LogSumExp(terms);
  }
  const double total = beta[lattice.initial()];

  std::vector<double> post(lattice.arcs.size(), 0.0);
  if (total == -kInf) return post;
  for (std::size_t a = 0; a < post.size(); ++a) {
    const auto& arc = lattice.arcs[a];
    post[a] = std::exp(alpha[arc.start] + w[a] + beta[arc.end] - total);
  }
  return post;
}

void RescoreConfig::Validate() const {
  if (k < 1) throw ConfigError("rescoring needs k >= 1");
  if (!(beam > 0.0)) throw ConfigError("rescore beam must be positive");
  if (!(scale_am > 0.0) || !(scale_lm > 0.0)) throw ConfigError("scales must be positive");
}

RescoreResult PushForwardRescore(const Lattice& lattice, const LmScorer& scorer,
                                 const RescoreConfig& cfg) {
  cfg.Validate();
  lattice.Validate();

  struct Entry {
    HistoryId hist;
    double cost;  // neg-log, scaled
    int arc;      // arc that produced this entry, -1 at the initial node
    int prev;     // entry index at the arc's start node
  };
  const std::size_t n = lattice.nodes.size();
  const auto out = lattice.OutgoingArcs();
  const auto final_mask = FinalMask(lattice);
  HistoryStore store(scorer);
  const auto unk = scorer.vocab().Find(kUnknownWord);

  std::vector<std::vector<Entry>> sets(n);
  std::vector<std::unordered_map<HistoryId, std::size_t>> index(n);
  sets[lattice.initial()].push_back({store.Initial(), 0.0, -1, -1});

  RescoreResult result;
  result.lattice = lattice;
  for (auto& arc : result.lattice.arcs) arc.lm = -kInf;

  // History reached from the best start-node entry, per arc; used to finish the
  // sentence-end score of arcs into final nodes.
  std::vector<HistoryId> best_next(lattice.arcs.size(), kNoHistory);
  auto by_cost = [](const Entry& a, const Entry& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.hist < b.hist;
  };

  for (int u : lattice.TopologicalOrder()) {
    auto& set = sets[u];
    std::vector<HistoryId> pending;
    for (const auto& e : set) {
      if (store.NeedsForward(e.hist)) pending.push_back(e.hist);
    }
    if (!pending.empty()) {
      store.Forward(pending);
      result.batches.push_back(pending.size());
    }
    if (final_mask[u]) {
      for (auto& e : set) {
        e.cost -= cfg.scale_lm * scorer.Score(store.Get(e.hist), scorer.sentence_end());
      }
    }
    std::sort(set.begin(), set.end(), by_cost);
    if (!set.empty()) {
      const double limit = set.front().cost + cfg.beam;
      std::erase_if(set, [&](const Entry& e) { return e.cost > limit; });
      if (set.size() > cfg.k) set.resize(cfg.k);
    }
    result.max_histories = std::max(result.max_histories, set.size());

    for (int a : out[u]) {
      const auto& arc = lattice.arcs[a];
      auto word = scorer.vocab().Find(arc.word);
      if (!word) {
        if (!unk) throw DataError("lattice word '" + arc.word + "' is not in the vocabulary");
        word = unk;
      }
      for (std::size_t i = 0; i < set.size(); ++i) {
        const Entry& e = set[i];
        const double lm = scorer.Score(store.Get(e.hist), *word);
        const HistoryId next = store.Extend(e.hist, *word);
        if (i == 0) {
          result.lattice.arcs[a].lm = lm;
          best_next[a] = next;
        }
        const double cost = e.cost - (cfg.scale_am * arc.am + cfg.scale_lm * lm);
        auto& target = sets[arc.end];
        auto [it, fresh] = index[arc.end].try_emplace(next, target.size());
        if (fresh) {
          target.push_back({next, cost, a, static_cast<int>(i)});
        } else if (cost < target[it->second].cost) {
          target[it->second] = {next, cost, a, static_cast<int>(i)};
        }
      }
    }
  }
  for (std::size_t a = 0; a < lattice.arcs.size(); ++a) {
    if (final_mask[lattice.arcs[a].end] && best_next[a] != kNoHistory) {
      store.EnsureForwarded(best_next[a]);
      result.lattice.arcs[a].lm += scorer.Score(store.Get(best_next[a]), scorer.sentence_end());
    }
  }
  result.forwards = store.forward_count();

  // Best final entry, then follow entry backpointers.
  int best_node = -1;
  for (int f : lattice.FinalNodes()) {
    if (sets[f].empty()) continue;
    if (best_node < 0 || sets[f].front().cost < sets[best_node].front().cost) best_node = f;
  }
  if (best_node < 0) throw DataError("rescoring left no history at any final node");
  LatticePath& path = result.best;
  path.score = -sets[best_node].front().cost;
  int node = best_node;
  int entry = 0;
  while (sets[node][entry].arc >= 0) {
    const Entry& e = sets[node][entry];
    path.arcs.push_back(e.arc);
    node = lattice.arcs[e.arc].start;
    entry = e.prev;
  }
  std::reverse(path.arcs.begin(), path.arcs.end());
  for (int a : path.arcs) path.words.push_back(lattice.arcs[a].word);
  return result;
}

ConfusionNetwork BuildConfusionNetwork(const Lattice& lattice, std::span<const double> posteriors,
                                       double scale_am, double scale_lm) {
  if (posteriors.size() != lattice.arcs.size()) throw ConfigError("one posterior per arc expected");
  ConfusionNetwork cn;
  if (lattice.arcs.empty()) return cn;

  // reach[u][v]: v is reachable from u (u itself included).
  const std::size_t n = lattice.nodes.size();
  const auto order = lattice.TopologicalOrder();
  const auto out = lattice.OutgoingArcs();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& r = reach[*it];
    r[*it] = 1;
    for (int a : out[*it]) {
      const auto& other = reach[lattice.arcs[a].end];
      for (std::size_t v = 0; v < n; ++v) r[v] |= other[v];
    }
  }
  auto precedes = [&](int a, int b) {
    return reach[lattice.arcs[a].end][lattice.arcs[b].start] != 0;
  };

  // start/end drive overlap matching; pivot slots tile the utterance.
  struct Slot {
    std::vector<int> arcs;
    int start;
    int end;
    bool pivot;
  };
  std::vector<Slot> slots;
  std::vector<char> placed(lattice.arcs.size(), 0);
  for (int a : LatticeBestPath(lattice, scale_am, scale_lm).arcs) {
    const auto& arc = lattice.arcs[a];
    slots.push_back({{a}, lattice.nodes[arc.start].frame, lattice.nodes[arc.end].frame, true});
    placed[a] = 1;
  }

  std::vector<int> rest;
  for (int a = 0; a < static_cast<int>(lattice.arcs.size()); ++a) {
    if (!placed[a]) rest.push_back(a);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](int a, int b) { return posteriors[a] > posteriors[b]; });

  for (int a : rest) {
    const int s = lattice.nodes[lattice.arcs[a].start].frame;
    const int e = lattice.nodes[lattice.arcs[a].end].frame;
    std::size_t lo = 0;
    std::size_t hi = slots.size();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (int b : slots[i].arcs) {
        if (precedes(b, a)) lo = std::max(lo, i + 1);
        if (precedes(a, b)) hi = std::min(hi, i);
      }
    }
    int best_overlap = 0;
    std::size_t target = slots.size();
    for (std::size_t i = lo; i < hi; ++i) {
      const int overlap = std::min(e, slots[i].end) - std::max(s, slots[i].start);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        target = i;
      }
    }
    if (target < slots.size()) {
      slots[target].arcs.push_back(a);
      continue;
    }
    std::size_t pos = lo;
    while (pos < hi && slots[pos].start < s) ++pos;
    slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(pos), Slot{{a}, s, e, false});
  }

  int cursor = 0;
  for (const auto& slot : slots) {
    std::map<std::string, double> mass;
    double total = 0.0;
    for (int a : slot.arcs) {
      mass[lattice.arcs[a].word] += posteriors[a];
      total += posteriors[a];
    }
    CnSlot out_slot;
    if (slot.pivot) cursor = slot.start;
    out_slot.start_frame = cursor;
    out_slot.end_frame = slot.pivot ? slot.end : cursor;
    cursor = out_slot.end_frame;
    if (total > 1.0) {
      for (auto& [w, p] : mass) p /= total;
    } else if (total < 1.0) {
      mass[kEpsilon] += 1.0 - total;
    }
    out_slot.entries.assign(mass.begin(), mass.end());
    std::stable_sort(out_slot.entries.begin(), out_slot.entries.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    cn.slots.push_back(std::move(out_slot));
  }
  return cn;
}

std::vector<std::string> CnDecode(const ConfusionNetwork& cn) {
  std::vector<std::string> words;
  for (const auto& slot : cn.slots) {
    if (slot.entries.empty()) continue;
    const auto& top = slot.entries.front();
    if (top.first != kEpsilon) words.push_back(top.first);
  }
  return words;
}

std::string WriteConfusionNetwork(const ConfusionNetwork& cn) {
  std::string out;
  for (const auto& slot : cn.slots) {
    out += fmt::format("{} {}", slot.start_frame, slot.end_frame);
    for (const auto& [w, p] : slot.entries) out += fmt::format(" {}:{:.6f}", w, p);
    out += '\n';
  }
  return out;
}

}  // namespace rnnsearch
