// include/rnnsearch/lattice/lattice_ops.hpp

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

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rnnsearch/io/lattice.hpp"
#include "rnnsearch/lm/scorer.hpp"
#include "rnnsearch/log_math.hpp"

namespace rnnsearch {

inline constexpr std::size_t kUnlimitedHistories = std::numeric_limits<std::size_t>::max();
inline constexpr const char* kEpsilon = "<eps>";

struct LatticePath {
  std::vector<std::string> words;
  std::vector<int> arcs;
  /// Sum of scale_am*am + scale_lm*lm along the path (natural log, higher is better).
  double score = -kInf;
};

/// Highest-scoring initial-to-final path by dynamic programming in topological order.
LatticePath LatticeBestPath(const Lattice& lattice, double scale_am, double scale_lm);

/// Arc posteriors with arc log-weights posterior_scale * (scale_am*am + scale_lm*lm).
std::vector<double> ForwardBackward(const Lattice& lattice, double scale_am, double scale_lm,
                                    double posterior_scale = 1.0);

struct RescoreConfig {
  /// Histories kept per node.
  std::size_t k = 16;
  /// Histories worse than the node best by more than this are dropped.
  double beam = kInf;
  double scale_am = 1.0;
  double scale_lm = 1.0;

  /// Throws ConfigError for k < 1, nonpositive beam or scales.
  void Validate() const;
};

struct RescoreResult {
  /// Same topology with arc lm replaced by the score from the best history at the
  /// arc's start node (sentence end included on arcs into final nodes).
  Lattice lattice;
  LatticePath best;
  /// Largest number of histories held by any node.
  std::size_t max_histories = 0;
  /// Recurrent steps computed, and the size of each per-node forwarding batch.
  std::size_t forwards = 0;
  std::vector<std::size_t> batches;
};

/// Push-forward rescoring: history sets travel along arcs in topological order.
RescoreResult PushForwardRescore(const Lattice& lattice, const LmScorer& scorer,
                                 const RescoreConfig& cfg);

struct CnSlot {
  /// (word or kEpsilon, posterior), sorted by descending posterior.
  std::vector<std::pair<std::string, double>> entries;
  int start_frame = 0;
  int end_frame = 0;
};

struct ConfusionNetwork {
  std::vector<CnSlot> slots;
};

/// Pivot clustering: slots are seeded from the lattice best path; the remaining arcs
/// join, by descending posterior, the time-overlapping slot allowed by their
/// predecessors and successors, or open a new slot. Residual mass becomes epsilon.
/// Seeded slots report their pivot arc's frames; opened slots report an empty
/// interval at the end of the preceding seeded slot.
ConfusionNetwork BuildConfusionNetwork(const Lattice& lattice, std::span<const double> posteriors,
                                       double scale_am, double scale_lm);

/// Per-slot argmax; epsilon winners are dropped.
std::vector<std::string> CnDecode(const ConfusionNetwork& cn);

std::string WriteConfusionNetwork(const ConfusionNetwork& cn);

}  // namespace rnnsearch
