// src/net/topology.cc

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

#include "rnnsearch/net/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rnnsearch/errors.hpp"

namespace rnnsearch {

void HmmTopology::Validate() const {
  auto check = [](double p, const char* name) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ConfigError(std::string(name) + " penalty must be finite and nonnegative");
    }
  };
  check(loop_penalty, "loop");
  check(forward_penalty, "forward");
  if (skip_allowed) check(skip_penalty, "skip");
}

double TransitionScore(const HmmTopology& topology, int delta) {
  switch (delta) {
    case 0:
      return topology.loop_penalty;
    case 1:
      return topology.forward_penalty;
    case 2:
      if (!topology.skip_allowed) throw ConfigError("skip transition is not allowed");
      return topology.skip_penalty;
    default:
      throw ConfigError("transition delta must be 0, 1 or 2");
  }
}

HmmTopology NormalizeTopology(const HmmTopology& topology) {
  topology.Validate();
  // Shift by the smallest penalty so exp() stays in range.
  double lo = std::min(topology.loop_penalty, topology.forward_penalty);
  if (topology.skip_allowed) lo = std::min(lo, topology.skip_penalty);
  double z = std::exp(lo - topology.loop_penalty) + std::exp(lo - topology.forward_penalty);
  if (topology.skip_allowed) z += std::exp(lo - topology.skip_penalty);
  const double log_z = lo - std::log(z);  // -ln sum exp(-p)

  HmmTopology out = topology;
  out.loop_penalty = topology.loop_penalty - log_z;
  out.forward_penalty = topology.forward_penalty - log_z;
  if (topology.skip_allowed) out.skip_penalty = topology.skip_penalty - log_z;
  return out;
}

}  // namespace rnnsearch
