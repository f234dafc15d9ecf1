// include/rnnsearch/io/rnn_weights.hpp

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
#include <string>
#include <string_view>
#include <vector>

namespace rnnsearch {

enum class CellType { kElman, kLstm };

std::string_view CellTypeName(CellType c);

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

/// One recurrent layer. Elman: input H x In, recurrent H x H, bias H x 1.
/// LSTM: the same with 4H rows, gate blocks ordered input, forget, cell, output.
struct RecurrentLayer {
  Matrix input;
  Matrix recurrent;
  Matrix bias;
  bool operator==(const RecurrentLayer&) const = default;
};

struct RecurrentLmData {
  CellType cell = CellType::kElman;
  std::size_t embed_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<std::string> vocab;
  Matrix embedding;  // V x E
  std::vector<RecurrentLayer> layers;
  Matrix output_weights;  // V x H
  Matrix output_bias;     // V x 1

  /// Throws DataError naming the first matrix whose shape disagrees with the header.
  void Validate() const;
  bool operator==(const RecurrentLmData&) const = default;
};

/// Text format:
///   RNNLM v1 <elman|lstm> <num_layers> <embed_dim> <hidden_dim> <vocab_size>
///   <vocab words, space separated>
///   then blocks `<name> <rows> <cols>` followed by `rows` lines of `cols` values, in order:
///   embedding, layer<i>.input, layer<i>.recurrent, layer<i>.bias (per layer),
///   output.weights, output.bias
RecurrentLmData LoadRnnWeights(std::string_view text);
RecurrentLmData LoadRnnWeightsFile(const std::string& path);
std::string WriteRnnWeights(const RecurrentLmData& lm);

}  // namespace rnnsearch
