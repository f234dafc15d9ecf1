// src/io/emissions.cc

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

#include "rnnsearch/io/emissions.hpp"

#include <cmath>
#include <fmt/format.h>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

EmissionMatrix::EmissionMatrix(std::string utterance_id, int frames, int states,
                               std::vector<double> scores, double frame_shift_s)
    : utterance_id_(std::move(utterance_id)),
      frames_(frames),
      states_(states),
      frame_shift_s_(frame_shift_s),
      scores_(std::move(scores)) {
  if (frames_ < 1 || states_ < 1) throw DataError("emission matrix needs T >= 1 and S >= 1");
  if (scores_.size() != static_cast<std::size_t>(frames_) * static_cast<std::size_t>(states_)) {
    throw DataError("emission matrix size does not match T x S");
  }
  if (!(frame_shift_s_ > 0.0)) throw DataError("frame shift must be positive");
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!std::isfinite(scores_[i]) || scores_[i] > 0.0) {
      throw DataError(fmt::format("non-log-probability {} at frame {}", scores_[i],
                                  i / static_cast<std::size_t>(states_)));
    }
  }
}

EmissionMatrix LoadEmissions(std::string_view text, std::string utterance_id) {
  TextReader in(text);
  std::string_view line;
  if (!in.NextNonBlank(&line)) in.Fail("empty emission file");
  auto header = SplitWords(line);
  int frames = 0;
  int states = 0;
  double shift = 0.0;
  if (header.size() != 5 || header[0] != "EMIT" || header[1] != "v1" ||
      !ParseInt(std::string_view(header[2]), &frames) ||
      !ParseInt(std::string_view(header[3]), &states) || !ParseDouble(header[4], &shift)) {
    in.Fail("expected header 'EMIT v1 <T> <S> <frame_shift_s>'");
  }
  if (frames < 1 || states < 1) in.Fail("T and S must be >= 1");
  if (!(shift > 0.0)) in.Fail("frame shift must be positive");

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(frames) * static_cast<std::size_t>(states));
  for (int t = 0; t < frames; ++t) {
    if (!in.NextNonBlank(&line)) in.Fail(fmt::format("missing row for frame {}", t));
    auto fields = SplitWords(line);
    if (fields.size() != static_cast<std::size_t>(states)) {
      in.Fail(fmt::format("frame {}: expected {} values, got {}", t, states, fields.size()));
    }
    for (const auto& f : fields) {
      double v = 0.0;
      if (!ParseDouble(f, &v)) in.Fail(fmt::format("frame {}: bad value '{}'", t, f));
      if (!std::isfinite(v) || v > 0.0) {
        in.Fail(fmt::format("frame {}: non-log-probability {}", t, f));
      }
      scores.push_back(v);
    }
  }
  if (in.NextNonBlank(&line)) in.Fail("trailing data after last frame");
  return EmissionMatrix(std::move(utterance_id), frames, states, std::move(scores), shift);
}

EmissionMatrix LoadEmissionsFile(const std::string& path, std::string utterance_id) {
  return LoadEmissions(ReadFile(path), std::move(utterance_id));
}

std::string WriteEmissions(const EmissionMatrix& m) {
  std::string out = fmt::format("EMIT v1 {} {} {}\n", m.frames(), m.states(), m.frame_shift_s());
  for (int t = 0; t < m.frames(); ++t) {
    auto row = m.Row(t);
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (s) out += ' ';
      out += fmt::format("{}", row[s]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace rnnsearch
