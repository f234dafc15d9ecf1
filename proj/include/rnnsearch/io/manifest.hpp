// include/rnnsearch/io/manifest.hpp

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

struct ManifestEntry {
  std::string utterance_id;
  std::string emission_path;
  double duration_s = 0.0;
  std::vector<std::string> reference;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  double TotalDuration() const;
};

/// `utt_id <TAB> emit_path <TAB> duration_s <TAB> reference words` per line.
/// Relative emission paths are resolved against `base_dir` when it is non-empty.
CorpusManifest LoadManifest(std::string_view text, const std::string& base_dir = {});
/// Resolves relative emission paths against the manifest's own directory.
CorpusManifest LoadManifestFile(const std::string& path);
std::string WriteManifest(const CorpusManifest& manifest);

}  // namespace rnnsearch
