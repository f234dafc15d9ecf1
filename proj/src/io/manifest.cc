// src/io/manifest.cc

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

#include "rnnsearch/io/manifest.hpp"

#include <filesystem>
#include <fmt/format.h>
#include <unordered_set>

#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

double CorpusManifest::TotalDuration() const {
  double total = 0.0;
  for (const auto& e : entries) total += e.duration_s;
  return total;
}

CorpusManifest LoadManifest(std::string_view text, const std::string& base_dir) {
  TextReader in(text);
  std::string_view line;
  CorpusManifest manifest;
  std::unordered_set<std::string> ids;
  while (in.NextNonBlank(&line)) {
    std::vector<std::string_view> cols;
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
      auto tab = line.find('\t', pos);
      if (tab == std::string_view::npos) in.Fail("expected 4 tab-separated columns");
      cols.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    cols.push_back(line.substr(pos));

    ManifestEntry e;
    auto id = SplitWords(cols[0]);
    auto path = SplitWords(cols[1]);
    auto dur = SplitWords(cols[2]);
    if (id.size() != 1 || path.size() != 1 || dur.size() != 1) in.Fail("malformed manifest line");
    e.utterance_id = id[0];
    e.emission_path = path[0];
    if (!ParseDouble(dur[0], &e.duration_s) || !(e.duration_s > 0.0)) {
      in.Fail("duration must be a positive number");
    }
    if (!ids.insert(e.utterance_id).second) in.Fail("duplicate utterance id '" + e.utterance_id + "'");
    if (!base_dir.empty() && std::filesystem::path(e.emission_path).is_relative()) {
      e.emission_path = (std::filesystem::path(base_dir) / e.emission_path).string();
    }
    e.reference = SplitWords(cols[3]);
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

CorpusManifest LoadManifestFile(const std::string& path) {
  auto dir = std::filesystem::path(path).parent_path().string();
  return LoadManifest(ReadFile(path), dir.empty() ? "." : dir);
}

std::string WriteManifest(const CorpusManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    out += fmt::format("{}\t{}\t{}\t{}\n", e.utterance_id, e.emission_path, e.duration_s,
                       JoinWords(e.reference));
  }
  return out;
}

}  // namespace rnnsearch
