// include/rnnsearch/io/emissions.hpp

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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rnnsearch {

/// Per-frame, per-state acoustic log-probabilities (natural log, all <= 0).
class EmissionMatrix {
 public:
  EmissionMatrix() = default;
  /// Throws DataError if the shape or values violate the invariants.
  EmissionMatrix(std::string utterance_id, int frames, int states, std::vector<double> scores,
                 double frame_shift_s = 0.01);

  const std::string& utterance_id() const { return utterance_id_; }
  void set_utterance_id(std::string id) { utterance_id_ = std::move(id); }
  int frames() const { return frames_; }
  int states() const { return states_; }
  double frame_shift_s() const { return frame_shift_s_; }
  double operator()(int t, int s) const {
    return scores_[static_cast<std::size_t>(t) * static_cast<std::size_t>(states_) +
                   static_cast<std::size_t>(s)];
  }
  std::span<const double> Row(int t) const {
    return {scores_.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(states_),
            static_cast<std::size_t>(states_)};
  }
  const std::vector<double>& scores() const { return scores_; }

 private:
  std::string utterance_id_;
  int frames_ = 0;
  int states_ = 0;
  double frame_shift_s_ = 0.01;
  std::vector<double> scores_;
};

/// `EMIT v1 <T> <S> <frame_shift_s>` header followed by T rows of S values.
EmissionMatrix LoadEmissions(std::string_view text, std::string utterance_id = {});
EmissionMatrix LoadEmissionsFile(const std::string& path, std::string utterance_id = {});
std::string WriteEmissions(const EmissionMatrix& m);

}  // namespace rnnsearch
