// src/io/rnn_weights.cc

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

#include "rnnsearch/io/rnn_weights.hpp"

#include <cmath>
#include <fmt/format.h>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

std::string_view CellTypeName(CellType c) { return c == CellType::kLstm ? "lstm" : "elman"; }

namespace {

struct Shape {
  std::string name;
  std::size_t rows;
  std::size_t cols;
};

std::vector<Shape> ExpectedShapes(CellType cell, std::size_t layers, std::size_t embed,
                                  std::size_t hidden, std::size_t vocab) {
  std::size_t gates = cell == CellType::kLstm ? 4 : 1;
  std::vector<Shape> shapes{{"embedding", vocab, embed}};
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t in = l == 0 ? embed : hidden;
    shapes.push_back({fmt::format("layer{}.input", l), gates * hidden, in});
    shapes.push_back({fmt::format("layer{}.recurrent", l), gates * hidden, hidden});
    shapes.push_back({fmt::format("layer{}.bias", l), gates * hidden, 1});
  }
  shapes.push_back({"output.weights", vocab, hidden});
  shapes.push_back({"output.bias", vocab, 1});
  return shapes;
}

std::vector<const Matrix*> MatricesInOrder(const RecurrentLmData& lm) {
  std::vector<const Matrix*> out{&lm.embedding};
  for (const auto& layer : lm.layers) {
    out.push_back(&layer.input);
    out.push_back(&layer.recurrent);
    out.push_back(&layer.bias);
  }
  out.push_back(&lm.output_weights);
  out.push_back(&lm.output_bias);
  return out;
}

}  // namespace

void RecurrentLmData::Validate() const {
  auto shapes = ExpectedShapes(cell, layers.size(), embed_dim, hidden_dim, vocab.size());
  auto mats = MatricesInOrder(*this);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Matrix& m = *mats[i];
    if (m.rows != shapes[i].rows || m.cols != shapes[i].cols ||
        m.data.size() != m.rows * m.cols) {
      throw DataError(fmt::format("dimension mismatch in matrix {}: expected {}x{}, got {}x{}",
                                  shapes[i].name, shapes[i].rows, shapes[i].cols, m.rows,
                                  m.cols));
    }
    for (double v : m.data) {
      if (!std::isfinite(v)) throw DataError("non-finite weight in matrix " + shapes[i].name);
    }
  }
}

RecurrentLmData LoadRnnWeights(std::string_view text) {
  TextReader in(text);
  std::string_view line;
  if (!in.NextNonBlank(&line)) in.Fail("empty recurrent LM file");
  auto header = SplitWords(line);
  std::size_t layers = 0, embed = 0, hidden = 0, vocab = 0;
  if (header.size() != 7 || header[0] != "RNNLM" || header[1] != "v1" ||
      !ParseInt(std::string_view(header[3]), &layers) ||
      !ParseInt(std::string_view(header[4]), &embed) ||
      !ParseInt(std::string_view(header[5]), &hidden) ||
      !ParseInt(std::string_view(header[6]), &vocab)) {
    in.Fail("expected header 'RNNLM v1 <cell_type> <num_layers> <embed_dim> <hidden_dim> <vocab_size>'");
  }
  RecurrentLmData lm;
  if (header[2] == "elman") {
    lm.cell = CellType::kElman;
  } else if (header[2] == "lstm") {
    lm.cell = CellType::kLstm;
  } else {
    in.Fail("unknown cell type '" + header[2] + "'");
  }
  if (layers < 1 || embed < 1 || hidden < 1 || vocab < 1) in.Fail("dimensions must be >= 1");
  lm.embed_dim = embed;
  lm.hidden_dim = hidden;

  if (!in.NextNonBlank(&line)) in.Fail("missing vocabulary line");
  lm.vocab = SplitWords(line);
  if (lm.vocab.size() != vocab) {
    in.Fail(fmt::format("vocabulary line has {} words, header declares {}", lm.vocab.size(), vocab));
  }

  auto shapes = ExpectedShapes(lm.cell, layers, embed, hidden, vocab);
  std::vector<Matrix> mats;
  for (const auto& shape : shapes) {
    if (!in.NextNonBlank(&line)) in.Fail("missing matrix " + shape.name);
    auto fields = SplitWords(line);
    std::size_t rows = 0, cols = 0;
    if (fields.size() != 3 || !ParseInt(std::string_view(fields[1]), &rows) ||
        !ParseInt(std::string_view(fields[2]), &cols)) {
      in.Fail("expected matrix header '<name> <rows> <cols>'");
    }
    if (fields[0] != shape.name) {
      in.Fail(fmt::format("expected matrix {}, found {}", shape.name, fields[0]));
    }
    if (rows != shape.rows || cols != shape.cols) {
      in.Fail(fmt::format("dimension mismatch in matrix {}: expected {}x{}, got {}x{}", shape.name,
                          shape.rows, shape.cols, rows, cols));
    }
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!in.NextNonBlank(&line)) in.Fail(fmt::format("matrix {}: missing row {}", shape.name, r));
      auto vals = SplitWords(line);
      if (vals.size() != cols) {
        in.Fail(fmt::format("dimension mismatch in matrix {}: row {} has {} values, expected {}",
                            shape.name, r, vals.size(), cols));
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!ParseDouble(vals[c], &m(r, c)) || !std::isfinite(m(r, c))) {
          in.Fail(fmt::format("matrix {}: bad value '{}'", shape.name, vals[c]));
        }
      }
    }
    mats.push_back(std::move(m));
  }
  if (in.NextNonBlank(&line)) in.Fail("trailing data after output.bias");

  std::size_t k = 0;
  lm.embedding = std::move(mats[k++]);
  lm.layers.resize(layers);
  for (auto& layer : lm.layers) {
    layer.input = std::move(mats[k++]);
    layer.recurrent = std::move(mats[k++]);
    layer.bias = std::move(mats[k++]);
  }
  lm.output_weights = std::move(mats[k++]);
  lm.output_bias = std::move(mats[k++]);
  lm.Validate();
  return lm;
}

RecurrentLmData LoadRnnWeightsFile(const std::string& path) {
  return LoadRnnWeights(ReadFile(path));
}

std::string WriteRnnWeights(const RecurrentLmData& lm) {
  lm.Validate();
  std::string out = fmt::format("RNNLM v1 {} {} {} {} {}\n", CellTypeName(lm.cell),
                                lm.layers.size(), lm.embed_dim, lm.hidden_dim, lm.vocab.size());
  out += JoinWords(lm.vocab) + "\n";
  auto shapes = ExpectedShapes(lm.cell, lm.layers.size(), lm.embed_dim, lm.hidden_dim,
                               lm.vocab.size());
  auto mats = MatricesInOrder(lm);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Matrix& m = *mats[i];
    out += fmt::format("{} {} {}\n", shapes[i].name, m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (c) out += ' ';
        out += fmt::format("{}", m(r, c));
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace rnnsearch
