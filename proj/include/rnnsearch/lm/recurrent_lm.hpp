// include/rnnsearch/lm/recurrent_lm.hpp

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

#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rnnsearch/io/rnn_weights.hpp"

namespace rnnsearch {

/// Recurrent LM (Elman tanh or LSTM cells) with a full softmax output layer.
///
/// A step consumes one input word and produces the next layer states plus the
/// log-softmax over the whole vocabulary for the following word.
class RecurrentLm {
 public:
  /// Per-layer hidden vectors; `cell` is only populated for LSTM layers.
  struct State {
    std::vector<std::vector<double>> hidden;
    std::vector<std::vector<double>> cell;
    bool operator==(const State&) const = default;
  };

  explicit RecurrentLm(RecurrentLmData data);

  const RecurrentLmData& data() const { return data_; }
  std::size_t vocab_size() const { return data_.vocab.size(); }
  std::optional<int> Find(std::string_view word) const;
  /// Like Find but falls back to <unk>.
  std::optional<int> Map(std::string_view word) const;

  State ZeroState() const;
  /// Throws DataError when `prev` does not match the layer dimensions or `word` is
  /// out of range.
  void Step(const State& prev, int word, State* next, std::vector<double>* log_dist) const;

 private:
  RecurrentLmData data_;
  std::unordered_map<std::string, int> index_;
  std::optional<int> unknown_;
};

}  // namespace rnnsearch
