// include/rnnsearch/io/lattice.hpp

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

#include <string>
#include <string_view>
#include <vector>

namespace rnnsearch {

struct LatticeNode {
  int frame = 0;
  /// Recombination key words joined by spaces. Informational only; not serialized.
  std::string key;
};

struct LatticeArc {
  int start = 0;
  int end = 0;
  std::string word;
  int variant = 0;
  /// Natural-log acoustic score: emissions, transition penalties and variant prior.
  double am = 0.0;
  /// Natural-log LM score. Arcs entering a final node also carry the sentence-end score.
  double lm = 0.0;
};

/// Word-level DAG. Node 0 is the initial node (frame 0); final nodes sit at the
/// largest frame. Arc frames strictly increase, so sorting nodes by frame yields a
/// topological order.
struct Lattice {
  std::string utterance_id;
  std::vector<LatticeNode> nodes;
  std::vector<LatticeArc> arcs;

  int initial() const { return 0; }
  int FinalFrame() const;
  std::vector<int> FinalNodes() const;
  std::vector<int> TopologicalOrder() const;
  std::vector<std::vector<int>> OutgoingArcs() const;
  std::vector<std::vector<int>> IncomingArcs() const;

  /// Throws DataError when an invariant is violated: dangling node references,
  /// non-increasing arc frames, unreachable or dead-end nodes, initial node not at 0.
  void Validate() const;
  /// Drops nodes that are unreachable from the initial node or cannot reach a final
  /// node, together with their arcs; renumbers the rest preserving order.
  void Trim();
  /// Number of distinct initial-to-final paths (saturates at the double range).
  double CountPaths() const;
};

/// SLF-style text:
///   VERSION=1 UTTERANCE=<id> N=<nodes> L=<links>
///   I=<i> t=<frame>
///   J=<j> S=<start> E=<end> W=<word> v=<variant> a=<am> l=<lm>
/// Scores are written with 6 decimals.
std::string WriteLattice(const Lattice& lattice);
Lattice ReadLattice(std::string_view text);
Lattice ReadLatticeFile(const std::string& path);

}  // namespace rnnsearch
