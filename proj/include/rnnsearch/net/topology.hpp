// include/rnnsearch/net/topology.hpp

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

namespace rnnsearch {

/// Left-to-right HMM transition penalties (neg-log costs), shared by every
/// pronunciation. A forward step out of the last state, or a skip out of the
/// second-to-last state, leaves the word.
struct HmmTopology {
  double loop_penalty = 0.0;
  double forward_penalty = 0.0;
  double skip_penalty = 0.0;
  bool skip_allowed = false;

  /// Throws ConfigError for negative or non-finite penalties.
  void Validate() const;
};

/// Cost of a transition advancing by `delta` states (0 loop, 1 forward, 2 skip).
/// Throws ConfigError for a skip when skips are disabled or any other delta.
double TransitionScore(const HmmTopology& topology, int delta);

/// Rescales exp(-penalty) over the allowed transitions of a state to sum to one and
/// returns the corresponding -ln probabilities.
HmmTopology NormalizeTopology(const HmmTopology& topology);

}  // namespace rnnsearch
