// src/lm/recurrent_lm.cc

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

#include "rnnsearch/lm/recurrent_lm.hpp"

#include <cmath>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/vocabulary.hpp"
#include "rnnsearch/log_math.hpp"

namespace rnnsearch {

namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out[r] = bias[r] + W_in[r] . x + W_rec[r] . h
void Affine(const RecurrentLayer& layer, const std::vector<double>& x, const std::vector<double>& h,
            std::vector<double>* out) {
  const std::size_t rows = layer.input.rows;
  out->assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = layer.bias(r, 0);
    for (std::size_t c = 0; c < layer.input.cols; ++c) acc += layer.input(r, c) * x[c];
    for (std::size_t c = 0; c < layer.recurrent.cols; ++c) acc += layer.recurrent(r, c) * h[c];
    (*out)[r] = acc;
  }
}

}  // namespace

RecurrentLm::RecurrentLm(RecurrentLmData data) : data_(std::move(data)) {
  data_.Validate();
  for (std::size_t i = 0; i < data_.vocab.size(); ++i) {
    if (!index_.emplace(data_.vocab[i], static_cast<int>(i)).second) {
      throw DataError("duplicate word '" + data_.vocab[i] + "' in recurrent LM vocabulary");
    }
  }
  unknown_ = Find(kUnknownWord);
}

std::optional<int> RecurrentLm::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> RecurrentLm::Map(std::string_view word) const {
  if (auto id = Find(word)) return id;
  return unknown_;
}

RecurrentLm::State RecurrentLm::ZeroState() const {
  State s;
  s.hidden.assign(data_.layers.size(), std::vector<double>(data_.hidden_dim, 0.0));
  if (data_.cell == CellType::kLstm) {
    s.cell.assign(data_.layers.size(), std::vector<double>(data_.hidden_dim, 0.0));
  }
  return s;
}

void RecurrentLm::Step(const State& prev, int word, State* next,
                       std::vector<double>* log_dist) const {
  const std::size_t layers = data_.layers.size();
  const std::size_t hid = data_.hidden_dim;
  const bool lstm = data_.cell == CellType::kLstm;
  if (prev.hidden.size() != layers || (lstm && prev.cell.size() != layers)) {
    throw DataError("recurrent state has the wrong number of layers");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (prev.hidden[l].size() != hid || (lstm && prev.cell[l].size() != hid)) {
      throw DataError("recurrent state has the wrong layer width");
    }
  }
  if (word < 0 || static_cast<std::size_t>(word) >= vocab_size()) {
    throw DataError("recurrent LM input word out of range");
  }

  State out;
  out.hidden.resize(layers);
  if (lstm) out.cell.resize(layers);

  std::vector<double> x(data_.embed_dim);
  for (std::size_t c = 0; c < data_.embed_dim; ++c) {
    x[c] = data_.embedding(static_cast<std::size_t>(word), c);
  }
  std::vector<double> pre;
  for (std::size_t l = 0; l < layers; ++l) {
    Affine(data_.layers[l], x, prev.hidden[l], &pre);
    auto& h = out.hidden[l];
    h.resize(hid);
    if (!lstm) {
      for (std::size_t k = 0; k < hid; ++k) h[k] = std::tanh(pre[k]);
    } else {
      auto& c = out.cell[l];
      c.resize(hid);
      for (std::size_t k = 0; k < hid; ++k) {
        double i = Sigmoid(pre[k]);
        double f = Sigmoid(pre[hid + k]);
        double g = std::tanh(pre[2 * hid + k]);
        double o = Sigmoid(pre[3 * hid + k]);
        c[k] = f * prev.cell[l][k] + i * g;
        h[k] = o * std::tanh(c[k]);
      }
    }
    x = h;
  }

  const std::size_t v = vocab_size();
  log_dist->assign(v, 0.0);
  for (std::size_t r = 0; r < v; ++r) {
    double acc = data_.output_bias(r, 0);
    for (std::size_t k = 0; k < hid; ++k) acc += data_.output_weights(r, k) * x[k];
    (*log_dist)[r] = acc;
  }
  const double norm = LogSumExp(*log_dist);
  for (double& z : *log_dist) z -= norm;
  *next = std::move(out);
}

}  // namespace rnnsearch
